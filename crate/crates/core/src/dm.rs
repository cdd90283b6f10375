//! Decision makers answering pairwise comparison queries.

use serde::{Deserialize, Serialize};

use crate::error::DmError;
use crate::models::{CostVector, PreferenceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "A")]
    PrefersA,
    #[serde(rename = "B")]
    PrefersB,
}

/// Where a run stands when a query is about to be asked.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    /// 1-based generation (or move, for local search).
    pub generation: usize,
    pub generations: usize,
    /// Queries answered so far.
    pub queries: usize,
    pub mmr: f64,
    /// Current MMR over the MMR at the start of the phase.
    pub normalized_mmr: f64,
}

pub trait DmOracle {
    /// Compares two cost vectors.
    fn answer(&mut self, a: &CostVector, b: &CostVector) -> Result<Answer, DmError>;

    /// Called right before every query.
    fn observe(&mut self, _progress: &Progress) {}
}

impl<T: DmOracle + ?Sized> DmOracle for &mut T {
    fn answer(&mut self, a: &CostVector, b: &CostVector) -> Result<Answer, DmError> {
        (**self).answer(a, b)
    }

    fn observe(&mut self, progress: &Progress) {
        (**self).observe(progress)
    }
}

impl<T: DmOracle + ?Sized> DmOracle for Box<T> {
    fn answer(&mut self, a: &CostVector, b: &CostVector) -> Result<Answer, DmError> {
        (**self).answer(a, b)
    }

    fn observe(&mut self, progress: &Progress) {
        (**self).observe(progress)
    }
}

/// Answers according to a hidden preference model; ties go to `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedDm {
    pub hidden: PreferenceModel,
}

impl SimulatedDm {
    pub fn new(hidden: PreferenceModel) -> Self {
        SimulatedDm { hidden }
    }
}

impl DmOracle for SimulatedDm {
    fn answer(&mut self, a: &CostVector, b: &CostVector) -> Result<Answer, DmError> {
        Ok(
            if self.hidden.loss(a.values()) <= self.hidden.loss(b.values()) {
                Answer::PrefersA
            } else {
                Answer::PrefersB
            },
        )
    }
}

/// Replays a fixed answer sequence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScriptedDm {
    answers: Vec<Answer>,
    next: usize,
}

impl ScriptedDm {
    pub fn new(answers: Vec<Answer>) -> Self {
        ScriptedDm { answers, next: 0 }
    }

    pub fn used(&self) -> usize {
        self.next
    }
}

impl DmOracle for ScriptedDm {
    fn answer(&mut self, _a: &CostVector, _b: &CostVector) -> Result<Answer, DmError> {
        let a = self
            .answers
            .get(self.next)
            .copied()
            .ok_or(DmError::Exhausted(self.next))?;
        self.next += 1;
        Ok(a)
    }
}
