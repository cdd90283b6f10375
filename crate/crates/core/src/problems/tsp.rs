//! Multi-objective symmetric TSP: one cost matrix per objective, tours are
//! Hamiltonian cycles, every objective is minimized.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::models::{CostVector, Orientation, PreferenceModel};

use super::{Encoding, Solution, SolveOutcome};

/// Largest city count accepted by the exhaustive oracle.
pub const MAX_EXACT_CITIES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    /// `layers[k][i][j]`: cost of edge `{i, j}` for objective `k`.
    pub layers: Vec<Vec<Vec<i64>>>,
    pub seed: u64,
}

/// Independent uniform symmetric integer cost matrices in `{1, …, 1000}`.
pub fn gen_tsp(cities: usize, n: usize, seed: u64) -> TspInstance {
    assert!(cities >= 4 && n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = vec![vec![vec![0i64; cities]; cities]; n];
    for layer in layers.iter_mut() {
        for i in 0..cities {
            for j in i + 1..cities {
                let c = rng.random_range(1..=1000);
                layer[i][j] = c;
                layer[j][i] = c;
            }
        }
    }
    TspInstance { layers, seed }
}

impl TspInstance {
    pub fn new(layers: Vec<Vec<Vec<i64>>>, seed: u64) -> Result<Self, SolverError> {
        let inst = TspInstance { layers, seed };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let size = self.size();
        if self.layers.len() < 2 || size < 4 {
            return Err(SolverError::InvalidInstance(
                "TSP needs at least two objectives and four cities".into(),
            ));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if layer.len() != size || layer.iter().any(|r| r.len() != size) {
                return Err(SolverError::InvalidInstance(format!(
                    "cost layer {k} is not {size}x{size}"
                )));
            }
            for i in 0..size {
                for j in 0..i {
                    if layer[i][j] != layer[j][i] {
                        return Err(SolverError::InvalidInstance(format!(
                            "cost layer {k} is not symmetric at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.layers.len()
    }

    pub fn size(&self) -> usize {
        self.layers.first().map_or(0, |l| l.len())
    }

    pub fn orientation(&self) -> Orientation {
        Orientation::Minimize
    }

    fn edge(&self, k: usize, i: usize, j: usize) -> f64 {
        self.layers[k][i][j] as f64
    }

    pub fn tour_cost(&self, tour: &[usize]) -> Vec<f64> {
        let size = tour.len();
        (0..self.n())
            .map(|k| {
                (0..size)
                    .map(|i| self.edge(k, tour[i], tour[(i + 1) % size]))
                    .sum()
            })
            .collect()
    }

    /// Rotates the tour to start at city 0 and picks the direction with the
    /// smaller second city, so equal cycles get equal encodings.
    pub fn canonical(tour: &[usize]) -> Vec<usize> {
        let size = tour.len();
        let start = tour.iter().position(|&c| c == 0).unwrap_or(0);
        let mut t: Vec<usize> = (0..size).map(|i| tour[(start + i) % size]).collect();
        if size > 2 && t[1] > t[size - 1] {
            t[1..].reverse();
        }
        t
    }

    pub fn solution(&self, tour: Vec<usize>) -> Solution {
        let tour = Self::canonical(&tour);
        let cost = CostVector::new(self.tour_cost(&tour)).expect("instance has n >= 2");
        Solution {
            encoding: Encoding::Tour(tour),
            cost,
        }
    }

    pub fn is_feasible(&self, tour: &[usize]) -> bool {
        let mut seen = vec![false; self.size()];
        tour.len() == self.size()
            && tour
                .iter()
                .all(|&c| c < self.size() && !std::mem::replace(&mut seen[c], true))
    }

    /// Nearest-neighbour tour from city 0 under the summed costs.
    pub fn nearest_neighbor(&self) -> Vec<usize> {
        let size = self.size();
        let summed = |i: usize, j: usize| (0..self.n()).map(|k| self.edge(k, i, j)).sum::<f64>();
        let mut visited = vec![false; size];
        let mut tour = vec![0];
        visited[0] = true;
        while tour.len() < size {
            let last = *tour.last().unwrap();
            let next = (0..size)
                .filter(|&c| !visited[c])
                .min_by(|&a, &b| summed(last, a).total_cmp(&summed(last, b)).then(a.cmp(&b)))
                .unwrap();
            visited[next] = true;
            tour.push(next);
        }
        tour
    }

    /// Nearest-neighbour seed improved by first-improvement 2-opt under the
    /// model, for at most `max_sweeps` full passes over the neighbourhood.
    pub fn solve_fixed(&self, model: &PreferenceModel, max_sweeps: usize) -> SolveOutcome {
        let size = self.size();
        let n = self.n();
        let mut tour = self.nearest_neighbor();
        let mut cost = self.tour_cost(&tour);
        let mut current = model.loss(&cost);
        let mut candidate = vec![0.0; n];
        let mut sweeps = 0usize;
        let mut exhausted = false;
        loop {
            if sweeps >= max_sweeps {
                exhausted = true;
                break;
            }
            sweeps += 1;
            let mut improved = false;
            for i in 0..size - 1 {
                for j in i + 2..size {
                    if i == 0 && j == size - 1 {
                        continue;
                    }
                    let (a, b) = (tour[i], tour[i + 1]);
                    let (c, d) = (tour[j], tour[(j + 1) % size]);
                    for k in 0..n {
                        candidate[k] = cost[k] - self.edge(k, a, b) - self.edge(k, c, d)
                            + self.edge(k, a, c)
                            + self.edge(k, b, d);
                    }
                    let loss = model.loss(&candidate);
                    if loss < current - 1e-9 {
                        tour[i + 1..=j].reverse();
                        cost.copy_from_slice(&candidate);
                        current = loss;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        SolveOutcome {
            solution: self.solution(tour),
            budget_exhausted: exhausted,
        }
    }

    /// Every distinct Hamiltonian cycle: `(size - 1)! / 2` tours.
    pub fn enumerate_tours(&self) -> Result<Vec<Solution>, SolverError> {
        let size = self.size();
        if size > MAX_EXACT_CITIES {
            return Err(SolverError::SizeGuard(format!(
                "{size} cities exceeds the exhaustive limit of {MAX_EXACT_CITIES}"
            )));
        }
        let mut rest: Vec<usize> = (1..size).collect();
        let mut out = Vec::new();
        permute(&mut rest, 0, &mut |perm| {
            if perm[0] < perm[perm.len() - 1] {
                let mut tour = Vec::with_capacity(size);
                tour.push(0);
                tour.extend_from_slice(perm);
                let cost = CostVector::new(self.tour_cost(&tour)).expect("n >= 2");
                out.push(Solution {
                    encoding: Encoding::Tour(tour),
                    cost,
                });
            }
        });
        Ok(out)
    }

    /// Every 2-opt move applied to `tour`.
    pub fn neighbors(&self, tour: &[usize]) -> Vec<Solution> {
        let size = tour.len();
        let mut out = Vec::new();
        for i in 0..size - 1 {
            for j in i + 2..size {
                if i == 0 && j == size - 1 {
                    continue;
                }
                let mut t = tour.to_vec();
                t[i + 1..=j].reverse();
                out.push(self.solution(t));
            }
        }
        out
    }

    /// One-point order crossover: the prefix of `a`, then the remaining
    /// cities in the order they appear in `b`.
    pub fn crossover<R: Rng + ?Sized>(&self, a: &[usize], b: &[usize], rng: &mut R) -> Solution {
        let cut = rng.random_range(1..self.size());
        let mut used = vec![false; self.size()];
        let mut child: Vec<usize> = a[..cut].to_vec();
        for &c in &child {
            used[c] = true;
        }
        child.extend(b.iter().copied().filter(|&c| !used[c]));
        self.solution(child)
    }

    /// Exchanges the cities at two distinct positions.
    pub fn swap_mutation<R: Rng + ?Sized>(&self, tour: &[usize], rng: &mut R) -> Solution {
        let size = tour.len();
        let i = rng.random_range(0..size);
        let j = (i + rng.random_range(1..size)) % size;
        let mut t = tour.to_vec();
        t.swap(i, j);
        self.solution(t)
    }
}

/// Heap-free recursive permutation generator.
fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}
