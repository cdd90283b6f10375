//! The set of admissible preference parameters, kept as linear constraints.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::RegretError;
use crate::lp::{lp_solve, ConstraintSense, LinearConstraint, LpResult, LpStatus};
use crate::models::{features, CostVector, Family, Monotone, Orientation};

/// Feasibility tolerance for points and vertices.
pub const POINT_TOL: f64 = 1e-7;

/// Largest dimension handled by exact vertex enumeration.
pub const MAX_ENUMERATION_DIM: usize = 25;

/// `preferred` is at least as good as `other` for the decision maker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceStatement {
    pub preferred: CostVector,
    pub other: CostVector,
}

impl PreferenceStatement {
    pub fn new(preferred: CostVector, other: CostVector) -> Result<Self, RegretError> {
        if preferred.n() != other.n() {
            return Err(RegretError::InvalidStatement(format!(
                "objective counts differ ({} vs {})",
                preferred.n(),
                other.n()
            )));
        }
        if preferred == other {
            return Err(RegretError::InvalidStatement(
                "both sides of the statement are identical".into(),
            ));
        }
        Ok(PreferenceStatement { preferred, other })
    }
}

/// `f_ω(preferred) ≤ f_ω(other)` under minimization (`≥` under
/// maximization), written as `a · ω ≤ 0`.
pub fn statement_to_constraint(
    s: &PreferenceStatement,
    family: Family,
    orientation: Orientation,
) -> LinearConstraint {
    let sign = orientation.sign();
    let a = features(family, s.preferred.values())
        .into_iter()
        .zip(features(family, s.other.values()))
        .map(|(p, o)| sign * (p - o))
        .collect();
    LinearConstraint::le(a, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPolytope {
    pub dim: usize,
    pub n: usize,
    pub family: Family,
    pub orientation: Orientation,
    pub base: Vec<LinearConstraint>,
    pub learned: Vec<LinearConstraint>,
}

impl ParameterPolytope {
    /// Normalization, nonnegativity and (for OWA) the weight ordering that
    /// favours balanced solutions. Choquet parameters are nonnegative
    /// Möbius masses (belief functions).
    pub fn initial(family: Family, n: usize, orientation: Orientation) -> Self {
        let dim = family.param_dim(n);
        let mut base = vec![LinearConstraint::eq(vec![1.0; dim], 1.0)];
        for i in 0..dim {
            let mut a = vec![0.0; dim];
            a[i] = 1.0;
            base.push(LinearConstraint::ge(a, 0.0));
        }
        let ordering = family.monotone(orientation);
        if ordering != Monotone::None {
            for j in 0..dim - 1 {
                let mut a = vec![0.0; dim];
                let (lo, hi) = match ordering {
                    Monotone::NonDecreasing => (j, j + 1),
                    _ => (j + 1, j),
                };
                a[lo] = 1.0;
                a[hi] = -1.0;
                base.push(LinearConstraint::le(a, 0.0));
            }
        }
        ParameterPolytope {
            dim,
            n,
            family,
            orientation,
            base,
            learned: Vec::new(),
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.base.iter().chain(&self.learned)
    }

    /// Rows handed to the LP solver (its variables are already ≥ 0).
    fn lp_rows(&self) -> Vec<LinearConstraint> {
        self.constraints()
            .filter(|c| !c.is_nonnegativity())
            .cloned()
            .collect()
    }

    pub fn contains(&self, omega: &[f64], tol: f64) -> bool {
        omega.len() == self.dim && self.constraints().all(|c| c.is_satisfied(omega, tol))
    }

    pub fn maximize(&self, objective: &[f64]) -> LpResult {
        lp_solve(objective, &self.lp_rows())
    }

    pub fn is_feasible(&self) -> bool {
        self.maximize(&vec![0.0; self.dim]).status == LpStatus::Optimal
    }

    /// New polytope with one more learned constraint; rejected when it would
    /// leave no admissible parameter.
    pub fn with_constraint(&self, c: LinearConstraint) -> Result<Self, RegretError> {
        let mut next = self.clone();
        next.learned.push(c);
        if !next.is_feasible() {
            return Err(RegretError::Inconsistent);
        }
        Ok(next)
    }

    pub fn with_statement(&self, s: &PreferenceStatement) -> Result<Self, RegretError> {
        self.with_constraint(statement_to_constraint(s, self.family, self.orientation))
    }

    /// A point of the polytope away from its boundary where possible: the
    /// mean of the maximizers and minimizers of every coordinate.
    pub fn reference_point(&self) -> Result<Vec<f64>, RegretError> {
        let rows = self.lp_rows();
        let mut sum = vec![0.0; self.dim];
        let mut count = 0.0;
        for i in 0..self.dim {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; self.dim];
                c[i] = s;
                let r = lp_solve(&c, &rows);
                if r.status != LpStatus::Optimal {
                    return Err(RegretError::Infeasible);
                }
                for (acc, v) in sum.iter_mut().zip(&r.point) {
                    *acc += v;
                }
                count += 1.0;
            }
        }
        Ok(sum.into_iter().map(|v| v / count).collect())
    }

    /// All extreme points, sorted lexicographically.
    ///
    /// Every vertex makes `dim` linearly independent constraints tight; we
    /// try each choice of tight inequalities next to the equalities, solve
    /// the square system and keep feasible, distinct solutions.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vec<f64>>, RegretError> {
        if self.dim > MAX_ENUMERATION_DIM {
            return Err(RegretError::DimensionTooLarge {
                dim: self.dim,
                max: MAX_ENUMERATION_DIM,
            });
        }
        let all: Vec<&LinearConstraint> = self.constraints().collect();
        let equalities: Vec<&LinearConstraint> = all
            .iter()
            .copied()
            .filter(|c| c.sense == ConstraintSense::EQ)
            .collect();
        let inequalities: Vec<&LinearConstraint> = all
            .iter()
            .copied()
            .filter(|c| c.sense != ConstraintSense::EQ)
            .collect();
        if equalities.len() > self.dim {
            return Err(RegretError::InvalidStatement(
                "more equalities than dimensions".into(),
            ));
        }
        let k = self.dim - equalities.len();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for_each_combination(inequalities.len(), k, |chosen| {
            let rows: Vec<&LinearConstraint> = equalities
                .iter()
                .copied()
                .chain(chosen.iter().map(|&i| inequalities[i]))
                .collect();
            if let Some(x) = solve_square(&rows, self.dim) {
                if all.iter().all(|c| c.is_satisfied(&x, POINT_TOL))
                    && !vertices.iter().any(|v| max_abs_diff(v, &x) <= POINT_TOL)
                {
                    vertices.push(x);
                }
            }
        });
        vertices.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(vertices)
    }

    /// Approximately uniform points from the polytope by hit-and-run from
    /// the reference point: `burn_in` steps, then one point every `thin`
    /// steps.
    pub fn sample_points<R: Rng + ?Sized>(
        &self,
        count: usize,
        burn_in: usize,
        thin: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>, RegretError> {
        let mut x = self.reference_point()?;
        let eq_basis = equality_basis(
            self.constraints()
                .filter(|c| c.sense == ConstraintSense::EQ),
        );
        let inequalities: Vec<&LinearConstraint> = self
            .constraints()
            .filter(|c| c.sense != ConstraintSense::EQ)
            .collect();
        let mut out = Vec::with_capacity(count);
        let mut step = 0usize;
        while out.len() < count {
            let mut dir: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
            for e in &eq_basis {
                let p: f64 = dir.iter().zip(e).map(|(a, b)| a * b).sum();
                for (d, b) in dir.iter_mut().zip(e) {
                    *d -= p * b;
                }
            }
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for d in &mut dir {
                    *d /= norm;
                }
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for c in &inequalities {
                    // a·(x + t d) {≤,≥} b
                    let ad: f64 = c.a.iter().zip(&dir).map(|(a, d)| a * d).sum();
                    let slack = c.b - c.lhs(&x);
                    let (ad, slack) = match c.sense {
                        ConstraintSense::GE => (-ad, -slack),
                        _ => (ad, slack),
                    };
                    if ad > 1e-12 {
                        hi = hi.min(slack / ad);
                    } else if ad < -1e-12 {
                        lo = lo.max(slack / ad);
                    }
                }
                if lo.is_finite() && hi.is_finite() && hi > lo {
                    let t = rng.random_range(lo..=hi);
                    for (xi, d) in x.iter_mut().zip(&dir) {
                        *xi += t * d;
                    }
                }
            }
            step += 1;
            if step > burn_in && (step - burn_in).is_multiple_of(thin.max(1)) {
                out.push(x.clone());
            }
        }
        Ok(out)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Orthonormal basis of the span of the equality rows (Gram-Schmidt).
fn equality_basis<'a>(rows: impl Iterator<Item = &'a LinearConstraint>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.a.clone();
        for e in &basis {
            let p: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (x, b) in v.iter_mut().zip(e) {
                *x -= p * b;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Solves the square system `rows` (taken as equalities) by Gaussian
/// elimination with partial pivoting; `None` when singular.
fn solve_square(rows: &[&LinearConstraint], dim: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut row = r.a.clone();
            row.push(r.b);
            row
        })
        .collect();
    for col in 0..dim {
        let pivot = (col..dim).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && row[col] != 0.0 {
                let f = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[dim]).collect())
}

/// Calls `f` with every increasing `k`-subset of `0..n`.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return;
    }
}
