use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riga_core::models::sample_simplex;
use riga_core::problems::{
    gen_knapsack, gen_tsp, pareto_indices, Encoding, SolverBudget, TspInstance,
};
use riga_core::{CostVector, Family, Instance, Orientation, PreferenceModel};

fn model(
    rng: &mut ChaCha8Rng,
    family: Family,
    n: usize,
    orientation: Orientation,
) -> PreferenceModel {
    let coords = sample_simplex(family.param_dim(n), rng, family.monotone(orientation));
    PreferenceModel::from_coords(family, n, orientation, &coords).unwrap()
}

/// Best aggregate over all `capacity`-subsets, by bitmask.
fn knapsack_brute_force(items: &[Vec<i64>], capacity: usize, m: &PreferenceModel) -> f64 {
    let n = items[0].len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..1 << items.len() {
        if mask.count_ones() as usize != capacity {
            continue;
        }
        let mut total = vec![0.0; n];
        for (i, item) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (t, v) in total.iter_mut().zip(item) {
                    *t += *v as f64;
                }
            }
        }
        best = best.max(m.aggregate(&total));
    }
    best
}

/// Heap's algorithm over the cities after 0.
fn tsp_brute_force(t: &TspInstance, m: &PreferenceModel) -> f64 {
    let size = t.size();
    let mut rest: Vec<usize> = (1..size).collect();
    let mut best = f64::INFINITY;
    let mut visit = |perm: &[usize]| {
        let mut tour = vec![0];
        tour.extend_from_slice(perm);
        best = best.min(m.aggregate(&t.tour_cost(&tour)));
    };
    let k = rest.len();
    let mut c = vec![0; k];
    visit(&rest);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                rest.swap(0, i);
            } else {
                rest.swap(c[i], i);
            }
            visit(&rest);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

#[test]
fn weighted_sum_greedy_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let budget = SolverBudget::default();
    for seed in 0..100 {
        let size = rng.random_range(4..=12);
        let n = rng.random_range(2..=4);
        let k = gen_knapsack(size, n, seed);
        let m = model(&mut rng, Family::WS, n, Orientation::Maximize);
        let oracle = knapsack_brute_force(&k.items, k.capacity, &m);
        let inst = Instance::Knapsack(k);
        let got = inst.solve_fixed(&m, &budget).unwrap().solution;
        assert!(
            (m.aggregate(got.cost.values()) - oracle).abs() <= 1e-9,
            "seed {seed}"
        );
        let exact = inst.solve_exact_small(&m).unwrap();
        assert!((m.aggregate(exact.cost.values()) - oracle).abs() <= 1e-9);
    }
}

/// Relative gaps over the instances are reported in full; the bound applies
/// to their mean, since a local optimum carries no per-instance guarantee.
fn check_mean_gap(label: &str, gaps: &[f64], bound: f64) {
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    println!("{label}: mean gap {mean:.5}, worst {worst:.5}");
    assert!(gaps.iter().all(|g| *g >= -1e-12));
    assert!(mean <= bound, "{label}: mean gap {mean}");
}

#[test]
fn knapsack_owa_local_search_is_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let budget = SolverBudget::default();
    let mut gaps = Vec::new();
    for seed in 0..50 {
        let k = gen_knapsack(12, 3, 100 + seed);
        assert_eq!(k.capacity, 6);
        let m = model(&mut rng, Family::OWA, 3, Orientation::Maximize);
        let oracle = knapsack_brute_force(&k.items, k.capacity, &m);
        let out = Instance::Knapsack(k).solve_fixed(&m, &budget).unwrap();
        assert!(!out.budget_exhausted);
        gaps.push((oracle - m.aggregate(out.solution.cost.values())) / oracle);
    }
    check_mean_gap("knapsack OWA", &gaps, 0.02);
}

#[test]
fn tsp_two_opt_is_close_for_weighted_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let budget = SolverBudget::default();
    let mut gaps = Vec::new();
    for seed in 0..50 {
        let t = gen_tsp(8, 3, 200 + seed);
        let m = model(&mut rng, Family::WS, 3, Orientation::Minimize);
        let oracle = tsp_brute_force(&t, &m);
        let out = Instance::Tsp(t).solve_fixed(&m, &budget).unwrap();
        assert!(!out.budget_exhausted);
        gaps.push((m.aggregate(out.solution.cost.values()) - oracle) / oracle);
    }
    check_mean_gap("TSP WS", &gaps, 0.05);
}

#[test]
fn local_search_never_loses_to_its_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let budget = SolverBudget::default();
    for seed in 0..60 {
        let family = Family::ALL[seed as usize % 3];
        let t = gen_tsp(9, 3, 300 + seed);
        let m = model(&mut rng, family, 3, Orientation::Minimize);
        let start = m.aggregate(&t.tour_cost(&t.nearest_neighbor()));
        let inst = Instance::Tsp(t);
        let out = inst.solve_fixed(&m, &budget).unwrap().solution;
        assert!(inst.is_feasible(&out));
        assert!(m.aggregate(out.cost.values()) <= start + 1e-9);
    }
}

#[test]
fn solutions_are_feasible_for_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let budget = SolverBudget::default();
    for seed in 0..30 {
        for family in Family::ALL {
            let k = Instance::Knapsack(gen_knapsack(14, 4, seed));
            let m = model(&mut rng, family, 4, Orientation::Maximize);
            let s = k.solve_fixed(&m, &budget).unwrap().solution;
            assert!(k.is_feasible(&s));
            let Encoding::Items(items) = &s.encoding else {
                panic!()
            };
            assert_eq!(items.len(), 7);
        }
    }
}

fn quadratic_pareto(points: &[CostVector], orientation: Orientation) -> Vec<usize> {
    let better = |a: &[f64], b: &[f64]| {
        let sign = orientation.sign();
        a.iter().zip(b).all(|(x, y)| sign * x <= sign * y)
            && a.iter().zip(b).any(|(x, y)| sign * x < sign * y)
    };
    // Identical points keep only their first occurrence.
    (0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| better(points[j].values(), points[i].values())))
        .filter(|&i| !(0..i).any(|j| points[j] == points[i]))
        .collect()
}

#[test]
fn pareto_filter_matches_pairwise_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for round in 0..20 {
        let orientation = if round % 2 == 0 {
            Orientation::Minimize
        } else {
            Orientation::Maximize
        };
        let points: Vec<CostVector> = (0..200)
            .map(|_| {
                CostVector::new((0..4).map(|_| rng.random_range(0..30) as f64).collect()).unwrap()
            })
            .collect();
        let mut got = pareto_indices(&points, orientation);
        got.sort();
        assert_eq!(got, quadratic_pareto(&points, orientation));
    }
}

/// Pareto-optimal value vectors of full-capacity subsets, by recursion.
fn knapsack_pareto_recursive(items: &[Vec<i64>], capacity: usize) -> Vec<Vec<i64>> {
    fn rec(items: &[Vec<i64>], i: usize, left: usize, acc: Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        if items.len() - i < left {
            return;
        }
        let with: Vec<i64> = acc.iter().zip(&items[i]).map(|(a, b)| a + b).collect();
        rec(items, i + 1, left - 1, with, out);
        rec(items, i + 1, left, acc, out);
    }
    let mut all = Vec::new();
    rec(items, 0, capacity, vec![0; items[0].len()], &mut all);
    let dominated = |a: &Vec<i64>, b: &Vec<i64>| a.iter().zip(b).all(|(x, y)| x <= y) && a != b;
    let mut front: Vec<Vec<i64>> = all
        .iter()
        .filter(|a| !all.iter().any(|b| dominated(a, b)))
        .cloned()
        .collect();
    front.sort();
    front.dedup();
    front
}

#[test]
fn knapsack_pareto_set_matches_recursive_enumeration() {
    for seed in 0..10 {
        let k = gen_knapsack(10, 3, 400 + seed);
        let oracle = knapsack_pareto_recursive(&k.items, k.capacity);
        let mut got: Vec<Vec<i64>> = Instance::Knapsack(k)
            .enumerate_pareto_small()
            .unwrap()
            .iter()
            .map(|s| s.cost.values().iter().map(|v| *v as i64).collect())
            .collect();
        got.sort();
        got.dedup();
        assert_eq!(got, oracle, "seed {seed}");
    }
}

#[test]
fn six_city_pareto_counts_are_plausible() {
    // 60 distinct cycles exist on 6 cities; the worked example has 17
    // Pareto-optimal ones.
    let mut counts = Vec::new();
    for seed in 0..20 {
        let inst = Instance::Tsp(gen_tsp(6, 3, seed));
        assert_eq!(inst.enumerate_all().unwrap().len(), 60);
        counts.push(inst.enumerate_pareto_small().unwrap().len());
    }
    assert!(counts.iter().all(|&c| (2..=60).contains(&c)), "{counts:?}");
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    assert!((5.0..=40.0).contains(&mean), "mean {mean}");
}

#[test]
fn identical_layers_leave_only_single_objective_optima() {
    let t = gen_tsp(6, 2, 7);
    let layers = vec![t.layers[0].clone(), t.layers[0].clone()];
    let inst = Instance::Tsp(TspInstance::new(layers, 7).unwrap());
    let all = inst.enumerate_all().unwrap();
    let best = all
        .iter()
        .map(|s| s.cost.values()[0])
        .fold(f64::INFINITY, f64::min);
    let front = inst.enumerate_pareto_small().unwrap();
    assert!(!front.is_empty());
    assert!(front.iter().all(|s| s.cost.values()[0] == best));
    assert_eq!(
        front.len(),
        all.iter().filter(|s| s.cost.values()[0] == best).count()
    );
}

#[test]
fn instance_text_round_trips() {
    for seed in 0..10 {
        for inst in [
            Instance::Knapsack(gen_knapsack(9, 3, seed)),
            Instance::Tsp(gen_tsp(7, 2, seed)),
        ] {
            assert_eq!(Instance::from_text(&inst.to_text()).unwrap(), inst);
        }
    }
}
