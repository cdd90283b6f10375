//! Multi-objective knapsack with unit item weights: pick at most `capacity`
//! items, maximizing every objective.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::models::{CostVector, Family, Orientation, PreferenceModel};

use super::{binomial, Encoding, Solution, SolveOutcome};

/// Subsets enumerated at most by the exhaustive oracle.
pub const MAX_ENUMERATED_SUBSETS: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub items: Vec<Vec<i64>>,
    pub capacity: usize,
    pub seed: u64,
}

/// Item values drawn uniformly in `{1, …, 1000}^n`; capacity is half the
/// item count.
pub fn gen_knapsack(items: usize, n: usize, seed: u64) -> KnapsackInstance {
    assert!(items >= 2 && n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = (0..items)
        .map(|_| (0..n).map(|_| rng.random_range(1..=1000)).collect())
        .collect::<Vec<Vec<i64>>>();
    KnapsackInstance {
        capacity: items.len() / 2,
        items,
        seed,
    }
}

impl KnapsackInstance {
    pub fn new(items: Vec<Vec<i64>>, capacity: usize, seed: u64) -> Result<Self, SolverError> {
        let inst = KnapsackInstance {
            items,
            capacity,
            seed,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.n();
        if self.items.len() < 2 || n < 2 {
            return Err(SolverError::InvalidInstance(
                "knapsack needs at least two items and two objectives".into(),
            ));
        }
        if self.capacity > self.items.len() {
            return Err(SolverError::InvalidInstance(format!(
                "capacity {} exceeds item count {}",
                self.capacity,
                self.items.len()
            )));
        }
        for (i, item) in self.items.iter().enumerate() {
            if item.len() != n || item.iter().any(|v| *v <= 0) {
                return Err(SolverError::InvalidInstance(format!(
                    "item {i} must have {n} positive values"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.items.first().map_or(0, |i| i.len())
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }

    pub fn orientation(&self) -> Orientation {
        Orientation::Maximize
    }

    pub fn value_of(&self, chosen: &[usize]) -> Vec<f64> {
        let mut total = vec![0.0; self.n()];
        for &i in chosen {
            for (t, v) in total.iter_mut().zip(&self.items[i]) {
                *t += *v as f64;
            }
        }
        total
    }

    pub fn solution(&self, mut chosen: Vec<usize>) -> Solution {
        chosen.sort_unstable();
        let cost = CostVector::new(self.value_of(&chosen)).expect("instance has n >= 2");
        Solution {
            encoding: Encoding::Items(chosen),
            cost,
        }
    }

    pub fn is_feasible(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![false; self.items.len()];
        chosen.len() <= self.capacity
            && chosen
                .iter()
                .all(|&i| i < self.items.len() && !std::mem::replace(&mut seen[i], true))
    }

    fn aggregated(&self, model: &PreferenceModel, i: usize) -> f64 {
        let v: Vec<f64> = self.items[i].iter().map(|&x| x as f64).collect();
        model.aggregate(&v)
    }

    /// Greedy (exact for weighted sums under unit weights), then 1-out/1-in
    /// first-improvement swaps for non-additive models.
    pub fn solve_fixed(&self, model: &PreferenceModel, max_evaluations: usize) -> SolveOutcome {
        if model.family() == Family::WS {
            let mut order: Vec<usize> = (0..self.size()).collect();
            let score: Vec<f64> = order.iter().map(|&i| self.aggregated(model, i)).collect();
            order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
            order.truncate(self.capacity);
            return SolveOutcome {
                solution: self.solution(order),
                budget_exhausted: false,
            };
        }

        let n = self.n();
        let mut chosen = vec![false; self.size()];
        let mut total = vec![0.0; n];
        let mut buf = vec![0.0; n];
        for _ in 0..self.capacity {
            let mut best: Option<(f64, usize)> = None;
            for i in (0..self.size()).filter(|&i| !chosen[i]) {
                for j in 0..n {
                    buf[j] = total[j] + self.items[i][j] as f64;
                }
                let loss = model.loss(&buf);
                if best.is_none_or(|(b, _)| loss < b) {
                    best = Some((loss, i));
                }
            }
            let (_, i) = best.expect("capacity never exceeds item count");
            chosen[i] = true;
            for j in 0..n {
                total[j] += self.items[i][j] as f64;
            }
        }

        let mut current = model.loss(&total);
        let mut evaluations = 0usize;
        let mut exhausted = false;
        'search: loop {
            for out in (0..self.size()).filter(|&i| chosen[i]) {
                for inc in (0..self.size()).filter(|&i| !chosen[i]) {
                    if evaluations >= max_evaluations {
                        exhausted = true;
                        break 'search;
                    }
                    evaluations += 1;
                    for j in 0..n {
                        buf[j] = total[j] - self.items[out][j] as f64 + self.items[inc][j] as f64;
                    }
                    let loss = model.loss(&buf);
                    if loss < current - 1e-12 {
                        chosen[out] = false;
                        chosen[inc] = true;
                        total.copy_from_slice(&buf);
                        current = loss;
                        continue 'search;
                    }
                }
            }
            break;
        }
        let items = (0..self.size()).filter(|&i| chosen[i]).collect();
        SolveOutcome {
            solution: self.solution(items),
            budget_exhausted: exhausted,
        }
    }

    /// All subsets of exactly `capacity` items. With positive values every
    /// smaller subset is Pareto-dominated by one of these.
    pub fn enumerate_full(&self) -> Result<Vec<Solution>, SolverError> {
        let count = binomial(self.size() as u64, self.capacity as u64);
        if count > MAX_ENUMERATED_SUBSETS {
            return Err(SolverError::SizeGuard(format!(
                "C({}, {}) = {count} subsets exceeds {MAX_ENUMERATED_SUBSETS}",
                self.size(),
                self.capacity
            )));
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut current = Vec::with_capacity(self.capacity);
        self.collect_subsets(0, &mut current, &mut out);
        Ok(out)
    }

    fn collect_subsets(&self, start: usize, current: &mut Vec<usize>, out: &mut Vec<Solution>) {
        if current.len() == self.capacity {
            out.push(self.solution(current.clone()));
            return;
        }
        let needed = self.capacity - current.len();
        for i in start..=self.size() - needed {
            current.push(i);
            self.collect_subsets(i + 1, current, out);
            current.pop();
        }
    }

    /// Every 1-out/1-in exchange.
    pub fn neighbors(&self, chosen: &[usize]) -> Vec<Solution> {
        let inside: Vec<bool> = (0..self.size()).map(|i| chosen.contains(&i)).collect();
        let mut out = Vec::new();
        for (k, _) in chosen.iter().enumerate() {
            for inc in (0..self.size()).filter(|&i| !inside[i]) {
                let mut next = chosen.to_vec();
                next[k] = inc;
                out.push(self.solution(next));
            }
        }
        out
    }

    /// One-point crossover on the item bitstrings, repaired to exactly
    /// `capacity` items by random drops or additions.
    pub fn crossover<R: Rng + ?Sized>(&self, a: &[usize], b: &[usize], rng: &mut R) -> Solution {
        let cut = rng.random_range(1..self.size());
        let mut bits: Vec<bool> = (0..self.size())
            .map(|i| {
                if i < cut {
                    a.contains(&i)
                } else {
                    b.contains(&i)
                }
            })
            .collect();
        let mut selected: Vec<usize> = (0..self.size()).filter(|&i| bits[i]).collect();
        while selected.len() > self.capacity {
            let k = rng.random_range(0..selected.len());
            bits[selected.swap_remove(k)] = false;
        }
        let mut free: Vec<usize> = (0..self.size()).filter(|&i| !bits[i]).collect();
        free.shuffle(rng);
        while selected.len() < self.capacity {
            selected.push(free.pop().expect("capacity never exceeds item count"));
        }
        self.solution(selected)
    }

    /// Swaps a selected item with an unselected one.
    pub fn swap_mutation<R: Rng + ?Sized>(&self, chosen: &[usize], rng: &mut R) -> Solution {
        let free: Vec<usize> = (0..self.size()).filter(|i| !chosen.contains(i)).collect();
        if chosen.is_empty() || free.is_empty() {
            return self.solution(chosen.to_vec());
        }
        let mut next = chosen.to_vec();
        let k = rng.random_range(0..next.len());
        next[k] = free[rng.random_range(0..free.len())];
        self.solution(next)
    }
}
