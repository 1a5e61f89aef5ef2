//! Dense linear programs over a handful of variables, with two
//! independent solution routes: a bounded-variable simplex and
//! brute-force vertex enumeration. Tests cross-check one against the
//! other, so the two must never share solving logic.

mod simplex;
mod vertex;

pub use simplex::solve_lp;
pub use vertex::{enumerate_vertices, enumerate_vertices_with};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Row value at most the right-hand side.
    Le,
    /// Row value at least the right-hand side.
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub direction: Direction,
}

/// A linear program with explicit variable bounds.
///
/// Constraint indices used by [`LinearProgram::active_set`] and
/// [`LpSolution::active_constraints`] run: equalities, then
/// inequalities, then lower bounds, then upper bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub equalities: Vec<Equality>,
    pub inequalities: Vec<Inequality>,
    /// Per-variable `(lower, upper)`; either side may be infinite.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if n == 0 {
            return Err(Error::invalid(
                "objective",
                "must have at least one variable",
            ));
        }
        for &c in &self.objective {
            if !c.is_finite() {
                return Err(Error::invalid("objective", "coefficients must be finite"));
            }
        }
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.bounds.len(),
            });
        }
        for (j, &(lo, up)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || up.is_nan() || lo == f64::INFINITY || up == f64::NEG_INFINITY {
                return Err(Error::invalid(
                    "bounds",
                    format!("bound {j} is malformed ({lo}, {up})"),
                ));
            }
            if lo > up {
                return Err(Error::invalid(
                    "bounds",
                    format!("bound {j} has lower {lo} above upper {up}"),
                ));
            }
        }
        let check_row = |coeffs: &[f64], rhs: f64, what: &str| -> Result<()> {
            if coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: coeffs.len(),
                });
            }
            if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(what, "coefficients must be finite"));
            }
            Ok(())
        };
        for eq in &self.equalities {
            check_row(&eq.coeffs, eq.rhs, "equalities")?;
        }
        for ineq in &self.inequalities {
            check_row(&ineq.coeffs, ineq.rhs, "inequalities")?;
        }
        Ok(())
    }

    /// Largest constraint violation at a point; 0 means feasible.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        if point.len() != self.n_vars() || point.iter().any(|x| !x.is_finite()) {
            return f64::INFINITY;
        }
        let dot = |coeffs: &[f64]| -> f64 { coeffs.iter().zip(point).map(|(c, x)| c * x).sum() };
        let mut worst = 0.0f64;
        for eq in &self.equalities {
            worst = worst.max((dot(&eq.coeffs) - eq.rhs).abs());
        }
        for ineq in &self.inequalities {
            let lhs = dot(&ineq.coeffs);
            let v = match ineq.direction {
                Direction::Le => lhs - ineq.rhs,
                Direction::Ge => ineq.rhs - lhs,
            };
            worst = worst.max(v);
        }
        for (&x, &(lo, up)) in point.iter().zip(&self.bounds) {
            worst = worst.max(lo - x);
            worst = worst.max(x - up);
        }
        worst
    }

    /// Indices of constraints holding with equality at a point, in the
    /// documented ordering.
    pub fn active_set(&self, point: &[f64], tol: f64) -> Vec<usize> {
        debug_assert_eq!(point.len(), self.n_vars());
        let dot = |coeffs: &[f64]| -> f64 { coeffs.iter().zip(point).map(|(c, x)| c * x).sum() };
        let mut active = Vec::new();
        let mut idx = 0;
        for eq in &self.equalities {
            if (dot(&eq.coeffs) - eq.rhs).abs() <= tol {
                active.push(idx);
            }
            idx += 1;
        }
        for ineq in &self.inequalities {
            if (dot(&ineq.coeffs) - ineq.rhs).abs() <= tol {
                active.push(idx);
            }
            idx += 1;
        }
        for (&x, &(lo, _)) in point.iter().zip(&self.bounds) {
            if lo.is_finite() && (x - lo).abs() <= tol {
                active.push(idx);
            }
            idx += 1;
        }
        for (&x, &(_, up)) in point.iter().zip(&self.bounds) {
            if up.is_finite() && (x - up).abs() <= tol {
                active.push(idx);
            }
            idx += 1;
        }
        active
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. `point`, `objective_value` and
/// `active_constraints` are meaningful only when `status` is `Optimal`.
#[derive(Debug, Clone, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub objective_value: f64,
    pub active_constraints: Vec<usize>,
}

impl LpSolution {
    pub(crate) fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            point: Vec::new(),
            objective_value: f64::NAN,
            active_constraints: Vec::new(),
        }
    }

    pub(crate) fn unbounded() -> Self {
        Self {
            status: LpStatus::Unbounded,
            point: Vec::new(),
            objective_value: f64::NAN,
            active_constraints: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> LinearProgram {
        LinearProgram {
            sense: Sense::Maximize,
            objective: vec![1.0, 1.0],
            equalities: vec![],
            inequalities: vec![Inequality {
                coeffs: vec![1.0, 1.0],
                rhs: 1.5,
                direction: Direction::Le,
            }],
            bounds: vec![(0.0, 1.0), (0.0, 1.0)],
        }
    }

    #[test]
    fn violation_is_zero_inside_and_positive_outside() {
        let lp = square();
        assert_eq!(lp.max_violation(&[0.5, 0.5]), 0.0);
        assert!((lp.max_violation(&[1.0, 1.0]) - 0.5).abs() < 1e-15);
        assert!((lp.max_violation(&[-0.2, 0.0]) - 0.2).abs() < 1e-15);
        assert_eq!(lp.max_violation(&[f64::NAN, 0.0]), f64::INFINITY);
    }

    #[test]
    fn active_set_indexing_covers_rows_then_bounds() {
        let lp = square();
        // ordering: inequality 0, lower bounds 1..3, upper bounds 3..5
        assert_eq!(lp.active_set(&[0.5, 1.0], 1e-9), vec![0, 3 + 1]);
        assert_eq!(lp.active_set(&[0.0, 0.0], 1e-9), vec![1, 2]);
    }

    #[test]
    fn validation_rejects_malformed_programs() {
        let mut lp = square();
        lp.bounds = vec![(0.0, 1.0)];
        assert!(lp.validate().is_err());

        let mut lp = square();
        lp.inequalities[0].coeffs = vec![1.0];
        assert!(lp.validate().is_err());

        let mut lp = square();
        lp.bounds[0] = (2.0, 1.0);
        assert!(lp.validate().is_err());

        let mut lp = square();
        lp.objective[0] = f64::NAN;
        assert!(lp.validate().is_err());

        assert!(square().validate().is_ok());
    }
}
