//! Dense two-phase simplex over nonnegative variables.
//!
//! Problems here are tiny (tens of variables and rows), so the tableau is a
//! plain `Vec<Vec<f64>>`. The entering column follows Bland's rule. Ties in
//! the ratio test go to the largest pivot element, and after a fixed number
//! of pivots to the lowest basis index, so the solver cannot cycle.

use std::fmt;

use serde::{Deserialize, Serialize};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const RATIO_TOL: f64 = 1e-12;
const DROP_TOL: f64 = 1e-14;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintSense {
    LE,
    GE,
    EQ,
}

/// `a · ω (≤ | ≥ | =) b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub a: Vec<f64>,
    pub b: f64,
    pub sense: ConstraintSense,
}

impl LinearConstraint {
    pub fn new(a: Vec<f64>, sense: ConstraintSense, b: f64) -> Self {
        LinearConstraint { a, b, sense }
    }

    pub fn le(a: Vec<f64>, b: f64) -> Self {
        Self::new(a, ConstraintSense::LE, b)
    }

    pub fn ge(a: Vec<f64>, b: f64) -> Self {
        Self::new(a, ConstraintSense::GE, b)
    }

    pub fn eq(a: Vec<f64>, b: f64) -> Self {
        Self::new(a, ConstraintSense::EQ, b)
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum()
    }

    /// Amount by which `x` violates the constraint (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.lhs(x);
        match self.sense {
            ConstraintSense::LE => (lhs - self.b).max(0.0),
            ConstraintSense::GE => (self.b - lhs).max(0.0),
            ConstraintSense::EQ => (lhs - self.b).abs(),
        }
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    /// Rows like `ω_i ≥ 0` that the solver's variable bounds already imply.
    pub fn is_nonnegativity(&self) -> bool {
        self.b == 0.0
            && self.sense == ConstraintSense::GE
            && self.a.iter().filter(|v| **v != 0.0).count() == 1
            && self.a.iter().any(|v| *v > 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub point: Vec<f64>,
}

impl LpResult {
    fn without_point(status: LpStatus) -> Self {
        LpResult {
            status,
            objective: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
            point: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `maximize c · x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: Vec<LinearConstraint>) -> Self {
        LinearProgram {
            objective,
            constraints,
        }
    }

    pub fn solve(&self) -> LpResult {
        lp_solve(&self.objective, &self.constraints)
    }
}

/// Plain-text dump, one row per line.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max:")?;
        for c in &self.objective {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        for (i, row) in self.constraints.iter().enumerate() {
            write!(f, "r{i}:")?;
            for a in &row.a {
                write!(f, " {a}")?;
            }
            let op = match row.sense {
                ConstraintSense::LE => "<=",
                ConstraintSense::GE => ">=",
                ConstraintSense::EQ => "=",
            };
            writeln!(f, " {op} {}", row.b)?;
        }
        write!(f, "bounds: x >= 0")
    }
}

/// Maximizes `c · x` over `{x ≥ 0 : constraints}`.
pub fn lp_solve(c: &[f64], constraints: &[LinearConstraint]) -> LpResult {
    Tableau::build(c, constraints).run()
}

struct Tableau {
    /// `rows[i]` holds the coefficients of constraint `i` followed by its rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_vars: usize,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
    objective: Vec<f64>,
}

impl Tableau {
    fn build(c: &[f64], constraints: &[LinearConstraint]) -> Tableau {
        let n_vars = c.len();
        let m = constraints.len();
        let n_slack = constraints
            .iter()
            .filter(|r| r.sense != ConstraintSense::EQ)
            .count();

        // Scale rows to unit max-norm and flip to b ≥ 0; the slack /
        // artificial layout depends on the resulting sense.
        let normalized: Vec<(Vec<f64>, ConstraintSense, f64)> = constraints
            .iter()
            .map(|r| {
                debug_assert_eq!(r.a.len(), n_vars);
                let scale = r.a.iter().fold(r.b.abs(), |m, v| m.max(v.abs()));
                let r = if scale > 0.0 && scale != 1.0 {
                    LinearConstraint::new(
                        r.a.iter().map(|v| v / scale).collect(),
                        r.sense,
                        r.b / scale,
                    )
                } else {
                    r.clone()
                };
                if r.b < 0.0 {
                    let sense = match r.sense {
                        ConstraintSense::LE => ConstraintSense::GE,
                        ConstraintSense::GE => ConstraintSense::LE,
                        ConstraintSense::EQ => ConstraintSense::EQ,
                    };
                    (r.a.iter().map(|v| -v).collect(), sense, -r.b)
                } else {
                    (r.a, r.sense, r.b)
                }
            })
            .collect();
        let n_art = normalized
            .iter()
            .filter(|(_, s, _)| *s != ConstraintSense::LE)
            .count();

        let first_artificial = n_vars + n_slack;
        let width = first_artificial + n_art + 1;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = n_vars;
        let mut art = first_artificial;
        for (a, sense, b) in normalized {
            let mut row = vec![0.0; width];
            row[..n_vars].copy_from_slice(&a);
            row[width - 1] = b;
            match sense {
                ConstraintSense::LE => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                ConstraintSense::GE => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
                ConstraintSense::EQ => {
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            n_vars,
            first_artificial,
            objective: c.to_vec(),
        }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(self.n_vars + 1, |r| r.len())
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width() - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    }
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` over the columns `< limit` from the current
    /// basic feasible solution. Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], limit: usize) -> bool {
        let patience = 50 * (self.rows.len() + limit);
        for step in 0.. {
            // Reduced cost of column j: c_j - Σ_i c_{B(i)} a_ij.
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(r, &b)| cost[b] * r[j])
                    .sum();
                cost[j] - z > COST_TOL
            });
            let Some(col) = entering else {
                return true;
            };
            let strict = step >= patience;
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                let better = match leaving {
                    None => true,
                    Some((k, best)) => {
                        if ratio < best - RATIO_TOL {
                            true
                        } else if ratio > best + RATIO_TOL {
                            false
                        } else if strict {
                            self.basis[i] < self.basis[k]
                        } else {
                            let ak = self.rows[k][col];
                            a > ak || (a == ak && self.basis[i] < self.basis[k])
                        }
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
        unreachable!()
    }

    fn run(mut self) -> LpResult {
        let width = self.width();
        let total_cols = width - 1;
        if self.first_artificial < total_cols {
            let mut phase1 = vec![0.0; total_cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            self.optimize(&phase1, total_cols);
            let infeasibility: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= self.first_artificial)
                .map(|(i, _)| self.rhs(i))
                .sum();
            if infeasibility > FEAS_TOL {
                return LpResult::without_point(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }

        let mut cost = vec![0.0; total_cols];
        cost[..self.n_vars].copy_from_slice(&self.objective);
        if !self.optimize(&cost, self.first_artificial) {
            return LpResult::without_point(LpStatus::Unbounded);
        }
        let mut point = vec![0.0; self.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                point[b] = self.rhs(i).max(0.0);
            }
        }
        let objective = self.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
        LpResult {
            status: LpStatus::Optimal,
            objective,
            point,
        }
    }

    /// After phase 1, pivots zero-level artificials out of the basis, or
    /// drops their row when it is redundant.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|&j| self.rows[i][j].abs() > PIVOT_TOL && !self.basis.contains(&j))
                .max_by(|&x, &y| {
                    self.rows[i][x]
                        .abs()
                        .total_cmp(&self.rows[i][y].abs())
                        .then(y.cmp(&x))
                });
            match replacement {
                Some(col) => {
                    let last = self.rows[i].len() - 1;
                    self.rows[i][last] = 0.0;
                    self.pivot(i, col);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_rows(d: usize) -> Vec<LinearConstraint> {
        vec![LinearConstraint::eq(vec![1.0; d], 1.0)]
    }

    #[test]
    fn maximize_single_coordinate_on_segment() {
        let r = lp_solve(&[1.0, 0.0], &simplex_rows(2));
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-12);
        assert!((r.point[0] - 1.0).abs() < 1e-12 && r.point[1].abs() < 1e-12);
    }

    #[test]
    fn degenerate_objective() {
        let r = lp_solve(&[1.0, 1.0], &simplex_rows(2));
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-12);
        assert!((r.point[0] + r.point[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ordered_triangle_matches_vertex_enumeration() {
        // ω1 ≤ ω2 ≤ ω3, Σ = 1; vertices (0,.5,.5), (1/3,1/3,1/3), (0,0,1)
        let mut rows = simplex_rows(3);
        rows.push(LinearConstraint::le(vec![1.0, -1.0, 0.0], 0.0));
        rows.push(LinearConstraint::le(vec![0.0, 1.0, -1.0], 0.0));
        let c = [2.0, -1.0, 0.0];
        let vertices = [[0.0, 0.5, 0.5], [1.0 / 3.0; 3], [0.0, 0.0, 1.0]];
        let oracle = vertices
            .iter()
            .map(|v| c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let r = lp_solve(&c, &rows);
        assert!((oracle - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.objective - oracle).abs() < 1e-9);
        for v in &r.point {
            assert!((v - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = vec![
            LinearConstraint::le(vec![1.0, 1.0], 1.0),
            LinearConstraint::ge(vec![1.0, 1.0], 2.0),
        ];
        assert_eq!(lp_solve(&[1.0, 0.0], &rows).status, LpStatus::Infeasible);

        let rows = vec![LinearConstraint::ge(vec![1.0, -1.0], 0.0)];
        assert_eq!(lp_solve(&[1.0, 1.0], &rows).status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_equalities() {
        // -x - y = -1 twice (redundant), maximize x - y.
        let rows = vec![
            LinearConstraint::eq(vec![-1.0, -1.0], -1.0),
            LinearConstraint::eq(vec![2.0, 2.0], 2.0),
            LinearConstraint::le(vec![1.0, 0.0], 0.75),
        ];
        let r = lp_solve(&[1.0, -1.0], &rows);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 0.5).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under Dantzig's rule without anti-cycling.
        let rows = vec![
            LinearConstraint::le(vec![0.25, -60.0, -0.04, 9.0], 0.0),
            LinearConstraint::le(vec![0.5, -90.0, -0.02, 3.0], 0.0),
            LinearConstraint::le(vec![0.0, 0.0, 1.0, 0.0], 1.0),
        ];
        let r = lp_solve(&[0.75, -150.0, 0.02, -6.0], &rows);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 0.05).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn display_dumps_rows() {
        let lp = LinearProgram::new(vec![1.0, 0.0], simplex_rows(2));
        let text = lp.to_string();
        assert!(text.starts_with("max: 1 0\n"));
        assert!(text.contains("r0: 1 1 = 1"));
    }

    #[test]
    fn deterministic_result() {
        let rows = simplex_rows(4);
        let a = lp_solve(&[1.0, 1.0, 1.0, 1.0], &rows);
        let b = lp_solve(&[1.0, 1.0, 1.0, 1.0], &rows);
        assert_eq!(a, b);
    }

    #[test]
    fn steep_homogeneous_rows_stay_feasible() {
        let learned: [[f64; 6]; 15] = [
            [1953.0, -1371.0, -1037.0, 165.0, -33.0, -1037.0],
            [-1018.0, 1451.0, -619.0, -85.0, -1018.0, 919.0],
            [1046.0, 936.0, -2044.0, 976.0, -317.0, -357.0],
            [-849.0, 124.0, 273.0, 84.0, -849.0, 124.0],
            [-1214.0, 1985.0, -1508.0, -281.0, -1214.0, 30.0],
            [169.0, -1327.0, 892.0, 169.0, 169.0, -795.0],
            [-196.0, 534.0, -889.0, -196.0, -196.0, -889.0],
            [-15.0, 921.0, -895.0, -15.0, -15.0, -895.0],
            [2134.0, -984.0, -1043.0, 346.0, 148.0, -1043.0],
            [1396.0, -4.0, -1158.0, 1326.0, 33.0, -1158.0],
            [350.0, -940.0, 886.0, 350.0, 350.0, -801.0],
            [1784.0, -44.0, -1929.0, -4.0, -202.0, -242.0],
            [-365.0, 1861.0, -1781.0, -365.0, -365.0, -94.0],
            [-1411.0, 925.0, 263.0, -1341.0, -48.0, 263.0],
            [738.0, -980.0, 115.0, -980.0, 115.0, 115.0],
        ];
        let mut rows = simplex_rows(6);
        rows.extend(
            learned
                .iter()
                .map(|a| LinearConstraint::le(a.to_vec(), 0.0)),
        );
        for i in 0..6 {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; 6];
                c[i] = s;
                let r = lp_solve(&c, &rows);
                assert!(r.is_optimal());
                for row in &rows {
                    assert!(row.violation(&r.point) < 1e-8, "c={c:?} row={row:?}");
                }
            }
        }
    }
}
