//! Pairwise max regret, max regret, minimax regret and the current solution
//! strategy (CSS) for choosing queries.
//!
//! All regrets are computed as losses (`sign · f_ω`), so the same code
//! serves minimization and maximization problems.

use std::collections::{HashMap, HashSet};

use crate::error::RegretError;
use crate::lp::{lp_solve, LinearConstraint, LpStatus};
use crate::models::{features, CostVector};
use crate::polytope::ParameterPolytope;

/// Regret values closer than this are treated as ties.
pub const REGRET_TOL: f64 = 1e-7;

/// Minimax regret at or below this is treated as zero.
pub const ZERO_REGRET: f64 = 1e-6;

type Result<T> = std::result::Result<T, RegretError>;

fn loss_direction(x: &[f64], other: &[f64], sign: f64) -> Vec<f64> {
    x.iter().zip(other).map(|(a, b)| sign * (a - b)).collect()
}

fn maximize_rows(objective: &[f64], rows: &[LinearConstraint]) -> Result<f64> {
    if objective.iter().all(|c| *c == 0.0) {
        return Ok(0.0);
    }
    let r = lp_solve(objective, rows);
    match r.status {
        LpStatus::Optimal => Ok(r.objective),
        _ => Err(RegretError::Infeasible),
    }
}

fn solver_rows(p: &ParameterPolytope) -> Vec<LinearConstraint> {
    p.constraints()
        .filter(|c| !c.is_nonnegativity())
        .cloned()
        .collect()
}

/// Worst-case loss of choosing `x` instead of `other` over the polytope.
pub fn pmr(x: &CostVector, other: &CostVector, p: &ParameterPolytope) -> Result<f64> {
    let objective = loss_direction(
        &features(p.family, x.values()),
        &features(p.family, other.values()),
        p.orientation.sign(),
    );
    if objective.iter().all(|c| *c == 0.0) {
        // Still an invariant breach when the polytope is empty.
        if !p.is_feasible() {
            return Err(RegretError::Infeasible);
        }
        return Ok(0.0);
    }
    maximize_rows(&objective, &solver_rows(p))
}

/// Max regret of `x` against the set, with the first adversary achieving it.
pub fn mr(x: &CostVector, set: &[CostVector], p: &ParameterPolytope) -> Result<(f64, usize)> {
    if set.is_empty() {
        return Err(RegretError::EmptySet);
    }
    let rows = solver_rows(p);
    let sign = p.orientation.sign();
    let phi_x = features(p.family, x.values());
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, other) in set.iter().enumerate() {
        let dir = loss_direction(&phi_x, &features(p.family, other.values()), sign);
        let v = maximize_rows(&dir, &rows)?;
        if v > best.0 + REGRET_TOL {
            best = (v, i);
        }
    }
    Ok(best)
}

/// Minimax regret and the first solution achieving it.
pub fn mmr(set: &[CostVector], p: &ParameterPolytope) -> Result<(f64, usize)> {
    let d = RegretEvaluator::new(set, p)?.minimax()?;
    Ok((d.value, d.argmin))
}

/// Outcome of a minimax-regret computation, with the regret of the argmin
/// against every distinct member of the set.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxRegret {
    pub value: f64,
    pub argmin: usize,
    /// `(index, pmr(argmin, index))` for the first occurrence of every
    /// distinct cost vector, in index order.
    pub argmin_regrets: Vec<(usize, f64)>,
}

impl MinimaxRegret {
    /// Adversaries of the argmin ordered by decreasing regret (ties by index).
    pub fn ranked_adversaries(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self
            .argmin_regrets
            .iter()
            .copied()
            .filter(|&(i, _)| i != self.argmin)
            .collect();
        v.sort_by(|a, b| {
            if (a.1 - b.1).abs() <= REGRET_TOL {
                a.0.cmp(&b.0)
            } else {
                b.1.total_cmp(&a.1)
            }
        });
        v
    }

    pub fn adversary(&self) -> Option<usize> {
        self.ranked_adversaries().first().map(|a| a.0)
    }
}

/// Shared state for regret computations over one set and one polytope.
///
/// Duplicate cost vectors are collapsed onto their first occurrence, since
/// the regret between identical vectors is zero.
pub struct RegretEvaluator<'a> {
    set: &'a [CostVector],
    distinct: Vec<usize>,
    phi: HashMap<usize, Vec<f64>>,
    rows: Vec<LinearConstraint>,
    sign: f64,
    polytope: &'a ParameterPolytope,
}

impl<'a> RegretEvaluator<'a> {
    pub fn new(set: &'a [CostVector], p: &'a ParameterPolytope) -> Result<Self> {
        if set.is_empty() {
            return Err(RegretError::EmptySet);
        }
        let mut seen = HashSet::new();
        let distinct: Vec<usize> = (0..set.len())
            .filter(|&i| seen.insert(set[i].key()))
            .collect();
        let phi = distinct
            .iter()
            .map(|&i| (i, features(p.family, set[i].values())))
            .collect();
        Ok(RegretEvaluator {
            set,
            distinct,
            phi,
            rows: solver_rows(p),
            sign: p.orientation.sign(),
            polytope: p,
        })
    }

    pub fn distinct(&self) -> &[usize] {
        &self.distinct
    }

    fn pair(&self, x: usize, other: usize) -> Result<f64> {
        maximize_rows(
            &loss_direction(&self.phi[&x], &self.phi[&other], self.sign),
            &self.rows,
        )
    }

    /// Minimax regret with branch pruning: a candidate is abandoned as soon
    /// as one of its regrets exceeds the best max regret found so far.
    /// Candidates are visited in order of their loss at a central point of
    /// the polytope, which tends to find a good incumbent early.
    pub fn minimax(&self) -> Result<MinimaxRegret> {
        if self.distinct.len() == 1 {
            if !self.polytope.is_feasible() {
                return Err(RegretError::Infeasible);
            }
            let i = self.distinct[0];
            return Ok(MinimaxRegret {
                value: 0.0,
                argmin: i,
                argmin_regrets: vec![(i, 0.0)],
            });
        }
        let center = self.polytope.reference_point()?;
        let mut order = self.distinct.clone();
        let loss_at = |i: usize| self.sign * crate::models::dot(&self.phi[&i], &center);
        order.sort_by(|&a, &b| loss_at(a).total_cmp(&loss_at(b)).then(a.cmp(&b)));

        let mut best: Option<(f64, usize, Vec<(usize, f64)>)> = None;
        for &x in &order {
            let mut regrets = Vec::with_capacity(order.len());
            let mut max_regret = 0.0f64;
            let mut pruned = false;
            for &other in &order {
                let v = if other == x {
                    0.0
                } else {
                    self.pair(x, other)?
                };
                regrets.push((other, v));
                max_regret = max_regret.max(v);
                if let Some((b, _, _)) = &best {
                    if max_regret > b + REGRET_TOL {
                        pruned = true;
                        break;
                    }
                }
            }
            if pruned {
                continue;
            }
            let better = match &best {
                None => true,
                Some((b, bi, _)) => {
                    max_regret < b - REGRET_TOL || (max_regret <= b + REGRET_TOL && x < *bi)
                }
            };
            if better {
                regrets.sort_by_key(|r| r.0);
                best = Some((max_regret, x, regrets));
            }
        }
        let (value, argmin, argmin_regrets) = best.expect("at least one candidate");
        Ok(MinimaxRegret {
            value,
            argmin,
            argmin_regrets,
        })
    }

    pub fn cost(&self, i: usize) -> &CostVector {
        &self.set[i]
    }
}

/// Unordered pairs of cost vectors already compared in a phase.
#[derive(Clone, Debug, Default)]
pub struct AskedPairs(HashSet<(Vec<u64>, Vec<u64>)>);

impl AskedPairs {
    fn key(a: &CostVector, b: &CostVector) -> (Vec<u64>, Vec<u64>) {
        let (ka, kb) = (a.key(), b.key());
        if ka <= kb {
            (ka, kb)
        } else {
            (kb, ka)
        }
    }

    pub fn insert(&mut self, a: &CostVector, b: &CostVector) -> bool {
        self.0.insert(Self::key(a, b))
    }

    pub fn contains(&self, a: &CostVector, b: &CostVector) -> bool {
        self.0.contains(&Self::key(a, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CssQuery {
    /// Compare the minimax-regret solution with one of its adversaries.
    Ask {
        x: usize,
        adversary: usize,
        mmr: f64,
    },
    /// Every informative pair has already been asked in this phase.
    Exhausted { mmr: f64, argmin: usize },
}

/// Picks the CSS query from a minimax computation: the argmin against its
/// strongest adversary, skipping pairs already asked.
pub fn css_from(detail: &MinimaxRegret, set: &[CostVector], asked: &AskedPairs) -> CssQuery {
    let x = detail.argmin;
    detail
        .ranked_adversaries()
        .into_iter()
        .filter(|&(_, v)| v > REGRET_TOL)
        .find(|&(i, _)| !asked.contains(&set[x], &set[i]))
        .map(|(adversary, _)| CssQuery::Ask {
            x,
            adversary,
            mmr: detail.value,
        })
        .unwrap_or(CssQuery::Exhausted {
            mmr: detail.value,
            argmin: x,
        })
}

pub fn css_query(
    set: &[CostVector],
    p: &ParameterPolytope,
    asked: &AskedPairs,
) -> Result<CssQuery> {
    let detail = RegretEvaluator::new(set, p)?.minimax()?;
    Ok(css_from(&detail, set, asked))
}
