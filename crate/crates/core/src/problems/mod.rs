//! Problem instances, single-objective sub-solvers for a fixed preference
//! model, exhaustive oracles and Pareto tooling.

mod catalog;
mod format;
mod knapsack;
mod pareto;
mod tsp;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::models::{CostVector, ModelError, Orientation, PreferenceModel};

pub use catalog::CatalogInstance;
pub use knapsack::{gen_knapsack, KnapsackInstance, MAX_ENUMERATED_SUBSETS};
pub use pareto::{pareto_filter, pareto_indices};
pub use tsp::{gen_tsp, TspInstance, MAX_EXACT_CITIES};

/// How a solution is represented in decision space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Sorted indices of the selected knapsack items.
    Items(Vec<usize>),
    /// A Hamiltonian cycle starting at city 0.
    Tour(Vec<usize>),
    /// Index of a catalog alternative.
    Choice(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub encoding: Encoding,
    pub cost: CostVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub solution: Solution,
    /// The local search stopped on its budget rather than at a local optimum.
    pub budget_exhausted: bool,
}

/// Work limits for the heuristic sub-solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverBudget {
    /// Swap evaluations per knapsack item.
    pub swaps_per_item: usize,
    /// Full 2-opt passes over a tour.
    pub two_opt_sweeps: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            swaps_per_item: 50,
            two_opt_sweeps: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Knapsack,
    Tsp,
    Catalog,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Knapsack => "knapsack",
            ProblemKind::Tsp => "tsp",
            ProblemKind::Catalog => "catalog",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "knapsack" | "mkp" => Ok(ProblemKind::Knapsack),
            "tsp" | "mtsp" => Ok(ProblemKind::Tsp),
            "catalog" => Ok(ProblemKind::Catalog),
            _ => Err(ModelError::Unknown {
                what: "problem",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Instance {
    Knapsack(KnapsackInstance),
    Tsp(TspInstance),
    Catalog(CatalogInstance),
}

impl Instance {
    /// Seeded random instance; `size` is the item, city or alternative count.
    pub fn generate(
        kind: ProblemKind,
        size: usize,
        n: usize,
        seed: u64,
    ) -> Result<Self, SolverError> {
        if n < 2 {
            return Err(SolverError::InvalidInstance(
                "at least two objectives are required".into(),
            ));
        }
        match kind {
            ProblemKind::Knapsack if size >= 2 => {
                Ok(Instance::Knapsack(gen_knapsack(size, n, seed)))
            }
            ProblemKind::Tsp if size >= 4 => Ok(Instance::Tsp(gen_tsp(size, n, seed))),
            ProblemKind::Catalog if size >= 1 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let alternatives = (0..size)
                    .map(|_| {
                        CostVector::new((0..n).map(|_| rng.random_range(1..=1000) as f64).collect())
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut c = CatalogInstance::new(alternatives, Orientation::Minimize)?;
                c.seed = seed;
                Ok(Instance::Catalog(c))
            }
            _ => Err(SolverError::InvalidInstance(format!(
                "size {size} is too small for {kind}"
            ))),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Knapsack(_) => ProblemKind::Knapsack,
            Instance::Tsp(_) => ProblemKind::Tsp,
            Instance::Catalog(_) => ProblemKind::Catalog,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        match self {
            Instance::Knapsack(k) => k.validate(),
            Instance::Tsp(t) => t.validate(),
            Instance::Catalog(c) => c.validate(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Knapsack(k) => k.n(),
            Instance::Tsp(t) => t.n(),
            Instance::Catalog(c) => c.n(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Instance::Knapsack(k) => k.size(),
            Instance::Tsp(t) => t.size(),
            Instance::Catalog(c) => c.size(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Instance::Knapsack(k) => k.seed,
            Instance::Tsp(t) => t.seed,
            Instance::Catalog(c) => c.seed,
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            Instance::Knapsack(k) => k.orientation(),
            Instance::Tsp(t) => t.orientation(),
            Instance::Catalog(c) => c.orientation,
        }
    }

    /// Cost vector of an encoding, or an error when it is not feasible.
    pub fn evaluate(&self, encoding: &Encoding) -> Result<CostVector, SolverError> {
        let infeasible =
            || SolverError::InvalidInstance(format!("infeasible encoding {encoding:?}"));
        match (self, encoding) {
            (Instance::Knapsack(k), Encoding::Items(items)) if k.is_feasible(items) => {
                Ok(CostVector::new(k.value_of(items))?)
            }
            (Instance::Tsp(t), Encoding::Tour(tour)) if t.is_feasible(tour) => {
                Ok(CostVector::new(t.tour_cost(tour))?)
            }
            (Instance::Catalog(c), Encoding::Choice(i)) if *i < c.size() => {
                Ok(c.alternatives[*i].clone())
            }
            _ => Err(infeasible()),
        }
    }

    /// Feasible encoding whose cached cost matches a fresh evaluation.
    pub fn is_feasible(&self, s: &Solution) -> bool {
        self.evaluate(&s.encoding).is_ok_and(|c| c == s.cost)
    }

    fn check_model(&self, model: &PreferenceModel) -> Result<(), SolverError> {
        if model.n() != self.n() {
            return Err(ModelError::DimensionMismatch {
                expected: self.n(),
                got: model.n(),
            }
            .into());
        }
        if model.orientation() != self.orientation() {
            return Err(SolverError::InvalidInstance(format!(
                "model orientation {:?} does not match the instance ({:?})",
                model.orientation(),
                self.orientation()
            )));
        }
        Ok(())
    }

    /// Near-optimal solution for a precisely known model.
    pub fn solve_fixed(
        &self,
        model: &PreferenceModel,
        budget: &SolverBudget,
    ) -> Result<SolveOutcome, SolverError> {
        self.check_model(model)?;
        let out = match self {
            Instance::Knapsack(k) => k.solve_fixed(model, budget.swaps_per_item * k.size()),
            Instance::Tsp(t) => t.solve_fixed(model, budget.two_opt_sweeps),
            Instance::Catalog(c) => c.solve_fixed(model),
        };
        assert!(
            self.is_feasible(&out.solution),
            "solver returned an infeasible solution"
        );
        Ok(out)
    }

    /// Every candidate the exhaustive oracles consider: full-capacity
    /// subsets, all distinct tours, or all alternatives.
    pub fn enumerate_all(&self) -> Result<Vec<Solution>, SolverError> {
        match self {
            Instance::Knapsack(k) => k.enumerate_full(),
            Instance::Tsp(t) => t.enumerate_tours(),
            Instance::Catalog(c) => Ok(c.all()),
        }
    }

    /// Exact optimum of the model by exhaustive enumeration.
    pub fn solve_exact_small(&self, model: &PreferenceModel) -> Result<Solution, SolverError> {
        self.check_model(model)?;
        let all = self.enumerate_all()?;
        let mut best: Option<(f64, Solution)> = None;
        for s in all {
            let loss = model.loss(s.cost.values());
            if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                best = Some((loss, s));
            }
        }
        Ok(best.expect("at least one feasible solution").1)
    }

    pub fn enumerate_pareto_small(&self) -> Result<Vec<Solution>, SolverError> {
        let all = self.enumerate_all()?;
        let costs: Vec<CostVector> = all.iter().map(|s| s.cost.clone()).collect();
        Ok(pareto_indices(&costs, self.orientation())
            .into_iter()
            .map(|i| all[i].clone())
            .collect())
    }

    pub fn neighbors(&self, s: &Solution) -> Vec<Solution> {
        match (self, &s.encoding) {
            (Instance::Knapsack(k), Encoding::Items(items)) => k.neighbors(items),
            (Instance::Tsp(t), Encoding::Tour(tour)) => t.neighbors(tour),
            (Instance::Catalog(c), Encoding::Choice(i)) => c.neighbors(*i),
            _ => Vec::new(),
        }
    }

    /// Crossover applied directly to solution encodings.
    pub fn crossover_solutions<R: Rng + ?Sized>(
        &self,
        a: &Solution,
        b: &Solution,
        rng: &mut R,
    ) -> Solution {
        match (self, &a.encoding, &b.encoding) {
            (Instance::Knapsack(k), Encoding::Items(x), Encoding::Items(y)) => {
                k.crossover(x, y, rng)
            }
            (Instance::Tsp(t), Encoding::Tour(x), Encoding::Tour(y)) => t.crossover(x, y, rng),
            (Instance::Catalog(c), Encoding::Choice(x), Encoding::Choice(y)) => {
                c.crossover(*x, *y, rng)
            }
            _ => a.clone(),
        }
    }

    pub fn mutate_solution<R: Rng + ?Sized>(&self, s: &Solution, rng: &mut R) -> Solution {
        match (self, &s.encoding) {
            (Instance::Knapsack(k), Encoding::Items(x)) => k.swap_mutation(x, rng),
            (Instance::Tsp(t), Encoding::Tour(x)) => t.swap_mutation(x, rng),
            (Instance::Catalog(c), Encoding::Choice(x)) => c.swap_mutation(*x, rng),
            _ => s.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        format::write_instance(self)
    }

    pub fn from_text(text: &str) -> Result<Self, SolverError> {
        format::parse_instance(text)
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // exact at every step: acc is C(n, i) before the update
        acc = match acc.checked_mul(n as u128 - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Family;

    fn model(family: Family, n: usize, o: Orientation, coords: &[f64]) -> PreferenceModel {
        PreferenceModel::from_coords(family, n, o, coords).unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(100, 50), u64::MAX);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn exact_small_cases() {
        // capacity 1: best single item
        let k = KnapsackInstance::new(vec![vec![5, 1], vec![2, 9], vec![4, 4]], 1, 0).unwrap();
        let inst = Instance::Knapsack(k);
        let m = model(Family::WS, 2, Orientation::Maximize, &[0.5, 0.5]);
        assert_eq!(
            inst.solve_exact_small(&m).unwrap().encoding,
            Encoding::Items(vec![1])
        );

        // 4 cities: best of 3 tours
        let t = Instance::Tsp(gen_tsp(4, 2, 1));
        let m = model(Family::WS, 2, Orientation::Minimize, &[0.3, 0.7]);
        let best = t.solve_exact_small(&m).unwrap();
        let min = t
            .enumerate_all()
            .unwrap()
            .iter()
            .map(|s| m.loss(s.cost.values()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(m.loss(best.cost.values()), min);
    }

    #[test]
    fn full_capacity_has_a_unique_solution() {
        let k = KnapsackInstance::new(vec![vec![5, 1], vec![2, 9], vec![4, 4]], 3, 0).unwrap();
        let inst = Instance::Knapsack(k);
        let m = model(Family::OWA, 2, Orientation::Maximize, &[0.7, 0.3]);
        let fixed = inst
            .solve_fixed(&m, &SolverBudget::default())
            .unwrap()
            .solution;
        assert_eq!(fixed, inst.solve_exact_small(&m).unwrap());
    }

    #[test]
    fn orientation_mismatch_is_rejected() {
        let inst = Instance::Knapsack(gen_knapsack(6, 2, 1));
        let m = model(Family::WS, 2, Orientation::Minimize, &[0.5, 0.5]);
        assert!(inst.solve_fixed(&m, &SolverBudget::default()).is_err());
        let m3 = model(Family::WS, 3, Orientation::Maximize, &[0.2, 0.3, 0.5]);
        assert!(inst.solve_fixed(&m3, &SolverBudget::default()).is_err());
    }

    #[test]
    fn identical_layers_give_single_objective_optima() {
        let base = gen_tsp(6, 2, 4);
        let layer = base.layers[0].clone();
        let inst = Instance::Tsp(TspInstance::new(vec![layer.clone(), layer], 0).unwrap());
        let pareto = inst.enumerate_pareto_small().unwrap();
        let all = inst.enumerate_all().unwrap();
        let best = all
            .iter()
            .map(|s| s.cost.values()[0])
            .fold(f64::INFINITY, f64::min);
        assert!(!pareto.is_empty());
        assert!(pareto.iter().all(|s| s.cost.values()[0] == best));
        // duplicates are kept once
        assert_eq!(pareto.len(), 1);
    }

    /// Second enumeration route: every subset of at most `capacity` items,
    /// built recursively, then a quadratic dominance filter.
    fn recursive_pareto(k: &KnapsackInstance) -> Vec<Vec<f64>> {
        fn rec(k: &KnapsackInstance, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
            if i == k.size() {
                out.push(k.value_of(cur));
                return;
            }
            rec(k, i + 1, cur, out);
            if cur.len() < k.capacity {
                cur.push(i);
                rec(k, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        rec(k, 0, &mut Vec::new(), &mut all);
        let dominated = |a: &Vec<f64>, b: &Vec<f64>| {
            a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
        };
        let mut front: Vec<Vec<f64>> = all
            .iter()
            .filter(|a| !all.iter().any(|b| dominated(a, b)))
            .cloned()
            .collect();
        front.sort_by(|a, b| a.partial_cmp(b).unwrap());
        front.dedup();
        front
    }

    #[test]
    fn knapsack_pareto_matches_recursive_enumeration() {
        for seed in 0..5 {
            let k = gen_knapsack(10, 3, seed);
            let inst = Instance::Knapsack(k.clone());
            let mut ours: Vec<Vec<f64>> = inst
                .enumerate_pareto_small()
                .unwrap()
                .into_iter()
                .map(|s| s.cost.values().to_vec())
                .collect();
            ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(ours, recursive_pareto(&k));
        }
    }

    #[test]
    fn instance_json_tagging() {
        let inst = Instance::generate(ProblemKind::Knapsack, 4, 2, 1).unwrap();
        let json = serde_json::to_string(&inst).unwrap();
        assert!(json.starts_with("{\"problem\":\"knapsack\""));
        assert_eq!(serde_json::from_str::<Instance>(&json).unwrap(), inst);
    }
}
