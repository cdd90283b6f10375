//! A decision problem given as an explicit list of alternatives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::models::{CostVector, Orientation, PreferenceModel};

use super::{Encoding, Solution, SolveOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogInstance {
    pub alternatives: Vec<CostVector>,
    pub orientation: Orientation,
    #[serde(default)]
    pub seed: u64,
}

impl CatalogInstance {
    pub fn new(
        alternatives: Vec<CostVector>,
        orientation: Orientation,
    ) -> Result<Self, SolverError> {
        let inst = CatalogInstance {
            alternatives,
            orientation,
            seed: 0,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let Some(first) = self.alternatives.first() else {
            return Err(SolverError::InvalidInstance("catalog is empty".into()));
        };
        if self.alternatives.iter().any(|a| a.n() != first.n()) {
            return Err(SolverError::InvalidInstance(
                "catalog alternatives differ in objective count".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.alternatives[0].n()
    }

    pub fn size(&self) -> usize {
        self.alternatives.len()
    }

    pub fn solution(&self, index: usize) -> Solution {
        Solution {
            encoding: Encoding::Choice(index),
            cost: self.alternatives[index].clone(),
        }
    }

    /// Exact: the first alternative of least loss.
    pub fn solve_fixed(&self, model: &PreferenceModel) -> SolveOutcome {
        let best = (0..self.size())
            .min_by(|&a, &b| {
                model
                    .loss(self.alternatives[a].values())
                    .total_cmp(&model.loss(self.alternatives[b].values()))
                    .then(a.cmp(&b))
            })
            .expect("catalog is non-empty");
        SolveOutcome {
            solution: self.solution(best),
            budget_exhausted: false,
        }
    }

    pub fn all(&self) -> Vec<Solution> {
        (0..self.size()).map(|i| self.solution(i)).collect()
    }

    pub fn neighbors(&self, index: usize) -> Vec<Solution> {
        (0..self.size())
            .filter(|&i| i != index)
            .map(|i| self.solution(i))
            .collect()
    }

    pub fn crossover<R: Rng + ?Sized>(&self, a: usize, b: usize, rng: &mut R) -> Solution {
        self.solution(if rng.random_bool(0.5) { a } else { b })
    }

    pub fn swap_mutation<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Solution {
        if self.size() < 2 {
            return self.solution(index);
        }
        let other = (index + rng.random_range(1..self.size())) % self.size();
        self.solution(other)
    }
}
