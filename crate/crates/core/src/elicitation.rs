//! The query loop shared by every method: compute the minimax regret, ask
//! the CSS query, add the answer to the polytope, repeat.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dm::{Answer, DmOracle, Progress};
use crate::error::{Error, RegretError, Result};
use crate::models::CostVector;
use crate::polytope::{ParameterPolytope, PreferenceStatement};
use crate::regret::{css_from, AskedPairs, CssQuery, RegretEvaluator, ZERO_REGRET};
use crate::trace::QueryRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseStop {
    /// Normalized MMR reached the threshold.
    Threshold,
    /// Every informative pair was already asked in this phase.
    Exhausted,
    /// An answer contradicted the previous ones and was rejected.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOutcome {
    /// First index of the MR-argmin in the set.
    pub argmin: usize,
    pub mmr_start: f64,
    pub mmr_end: f64,
    pub queries: usize,
    pub stop: PhaseStop,
}

/// Whether a phase that started at `start` may stop at `current`.
pub fn below_threshold(current: f64, start: f64, delta: f64) -> bool {
    current <= ZERO_REGRET || current <= delta * start
}

/// Polytope, decision maker and query log of one run.
pub struct Elicitation<'d> {
    pub polytope: ParameterPolytope,
    dm: &'d mut dyn DmOracle,
    pub queries: Vec<QueryRecord>,
    pub rejected: Option<QueryRecord>,
    pub warnings: Vec<String>,
    /// Reported to the decision maker through [`Progress`].
    pub generation: usize,
    pub generations: usize,
    deadline: Option<Instant>,
}

impl<'d> Elicitation<'d> {
    pub fn new(
        polytope: ParameterPolytope,
        dm: &'d mut dyn DmOracle,
        deadline: Option<Instant>,
    ) -> Self {
        Elicitation {
            polytope,
            dm,
            queries: Vec::new(),
            rejected: None,
            warnings: Vec::new(),
            generation: 0,
            generations: 0,
            deadline,
        }
    }

    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    pub fn inconsistent(&self) -> bool {
        self.rejected.is_some()
    }

    /// Elicits over `set` until its MMR drops to `delta` times its value
    /// at the start of the phase (or to zero).
    pub fn phase(&mut self, set: &[CostVector], delta: f64) -> Result<PhaseOutcome> {
        if set.is_empty() {
            return Err(RegretError::EmptySet.into());
        }
        let mut asked = AskedPairs::default();
        let mut detail = RegretEvaluator::new(set, &self.polytope)?.minimax()?;
        let start = detail.value;
        let mut queries = 0;
        loop {
            if below_threshold(detail.value, start, delta) {
                return Ok(self.outcome(
                    detail.argmin,
                    start,
                    detail.value,
                    queries,
                    PhaseStop::Threshold,
                ));
            }
            let (x, adversary) = match css_from(&detail, set, &asked) {
                CssQuery::Ask { x, adversary, .. } => (x, adversary),
                CssQuery::Exhausted { argmin, mmr } => {
                    self.warnings.push(format!(
                        "generation {}: no unasked informative pair left at MMR {mmr}",
                        self.generation
                    ));
                    return Ok(self.outcome(argmin, start, mmr, queries, PhaseStop::Exhausted));
                }
            };
            self.check_deadline()?;
            let progress = Progress {
                generation: self.generation,
                generations: self.generations,
                queries: self.queries.len(),
                mmr: detail.value,
                normalized_mmr: if start > 0.0 {
                    detail.value / start
                } else {
                    0.0
                },
            };
            self.dm.observe(&progress);
            let (a, b) = (&set[x], &set[adversary]);
            let answer = self.dm.answer(a, b)?;
            asked.insert(a, b);
            let record = QueryRecord {
                generation: self.generation,
                a: a.clone(),
                b: b.clone(),
                answer,
                mmr_before: detail.value,
            };
            let statement = match answer {
                Answer::PrefersA => PreferenceStatement::new(a.clone(), b.clone()),
                Answer::PrefersB => PreferenceStatement::new(b.clone(), a.clone()),
            }?;
            match self.polytope.with_statement(&statement) {
                Ok(next) => {
                    self.polytope = next;
                    self.queries.push(record);
                    queries += 1;
                }
                Err(RegretError::Inconsistent) => {
                    self.rejected = Some(record);
                    return Ok(self.outcome(
                        detail.argmin,
                        start,
                        detail.value,
                        queries,
                        PhaseStop::Inconsistent,
                    ));
                }
                Err(e) => return Err(e.into()),
            }
            debug_assert_eq!(self.polytope.learned.len(), self.queries.len());
            detail = RegretEvaluator::new(set, &self.polytope)?.minimax()?;
        }
    }

    fn outcome(
        &self,
        argmin: usize,
        start: f64,
        end: f64,
        queries: usize,
        stop: PhaseStop,
    ) -> PhaseOutcome {
        PhaseOutcome {
            argmin,
            mmr_start: start,
            mmr_end: end,
            queries,
            stop,
        }
    }
}
