//! Two-phase primal simplex on a dense tableau with variable bounds.
//!
//! Nonbasic variables rest at either bound, entering steps may terminate
//! in a bound flip instead of a pivot, and Bland's rule breaks ties on
//! both the entering and leaving side so no cycle can form. Singleton
//! rows are folded into the bounds up front, which keeps the tableau
//! small and removes the worst degeneracy.

use crate::error::{Error, Result};
use crate::lp::{Direction, LinearProgram, LpSolution, LpStatus, Sense};
use crate::FEASIBILITY_TOL;

/// Reduced-cost threshold below which a column is not worth entering.
const COST_TOL: f64 = 1e-9;
/// Smallest coefficient magnitude usable as a pivot or ratio divisor.
const PIVOT_TOL: f64 = 1e-10;
/// Absolute tolerance for ratio-test ties.
const RATIO_TIE: f64 = 1e-12;
/// Residual sum of artificials above which phase 1 reports infeasible.
const PHASE1_TOL: f64 = 1e-8;
const MAX_ITER: usize = 10_000;

/// Solve a linear program. `Ok` carries optimal, infeasible and
/// unbounded outcomes; `Err` is reserved for malformed input and
/// numerical breakdown.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.n_vars();

    // Working bounds, tightened by folding singleton rows.
    let mut lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    let mut up: Vec<f64> = lp.bounds.iter().map(|b| b.1).collect();

    // (coefficients, rhs, slack sign: 0 equality, +1 for <=, -1 for >=)
    let mut rows: Vec<(Vec<f64>, f64, i8)> = Vec::new();
    for eq in &lp.equalities {
        if eq.coeffs.iter().all(|&c| c == 0.0) {
            if eq.rhs.abs() > FEASIBILITY_TOL {
                return Ok(LpSolution::infeasible());
            }
            continue;
        }
        rows.push((eq.coeffs.clone(), eq.rhs, 0));
    }
    for ineq in &lp.inequalities {
        let nonzero: Vec<usize> = (0..n).filter(|&j| ineq.coeffs[j] != 0.0).collect();
        match nonzero.len() {
            0 => {
                let violated = match ineq.direction {
                    Direction::Le => ineq.rhs < -FEASIBILITY_TOL,
                    Direction::Ge => ineq.rhs > FEASIBILITY_TOL,
                };
                if violated {
                    return Ok(LpSolution::infeasible());
                }
            }
            1 => {
                let j = nonzero[0];
                let a = ineq.coeffs[j];
                let bound = ineq.rhs / a;
                let caps_above = match ineq.direction {
                    Direction::Le => a > 0.0,
                    Direction::Ge => a < 0.0,
                };
                if caps_above {
                    up[j] = up[j].min(bound);
                } else {
                    lo[j] = lo[j].max(bound);
                }
            }
            _ => {
                let slack_sign = match ineq.direction {
                    Direction::Le => 1,
                    Direction::Ge => -1,
                };
                rows.push((ineq.coeffs.clone(), ineq.rhs, slack_sign));
            }
        }
    }

    for j in 0..n {
        if !lo[j].is_finite() {
            return Err(Error::invalid(
                "bounds",
                format!("variable {j} needs a finite lower bound"),
            ));
        }
        if lo[j] > up[j] {
            if lo[j] - up[j] > FEASIBILITY_TOL {
                return Ok(LpSolution::infeasible());
            }
            up[j] = lo[j];
        }
    }

    // Shift every variable to start at zero: y = x - lo.
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.2 != 0).count();
    let art_start = n + n_slack;
    let total = art_start + m;

    let mut t = Tableau {
        rows: vec![vec![0.0; total]; m],
        beta: vec![0.0; m],
        basis: vec![0; m],
        cost: vec![0.0; total],
        upper: vec![f64::INFINITY; total],
        at_upper: vec![false; total],
        in_basis: vec![false; total],
        art_start,
        iterations: 0,
    };
    for j in 0..n {
        t.upper[j] = up[j] - lo[j];
    }

    let mut slack = n;
    for (i, (coeffs, rhs, sign)) in rows.iter().enumerate() {
        let mut b = *rhs;
        for j in 0..n {
            t.rows[i][j] = coeffs[j];
            b -= coeffs[j] * lo[j];
        }
        if *sign != 0 {
            t.rows[i][slack] = *sign as f64;
            slack += 1;
        }
        if b < 0.0 {
            b = -b;
            for v in &mut t.rows[i] {
                *v = -*v;
            }
        }
        let art = art_start + i;
        t.rows[i][art] = 1.0;
        t.basis[i] = art;
        t.in_basis[art] = true;
        t.beta[i] = b;
    }

    // Phase 1: minimize the sum of artificials. With the artificial
    // basis the reduced cost of column j is -sum_i rows[i][j].
    for j in 0..total {
        if j >= art_start {
            t.cost[j] = 0.0;
        } else {
            t.cost[j] = -t.rows.iter().map(|r| r[j]).sum::<f64>();
        }
    }
    match t.run()? {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return Err(Error::Numerical(
                "phase 1 reported an unbounded direction".into(),
            ))
        }
    }
    let residual: f64 = (0..m)
        .filter(|&i| t.basis[i] >= art_start)
        .map(|i| t.beta[i])
        .sum();
    if residual > PHASE1_TOL {
        return Ok(LpSolution::infeasible());
    }

    // Pivot leftover artificials out of the basis; rows that cannot be
    // pivoted are linearly dependent and get dropped.
    let mut drop_rows = Vec::new();
    for r in 0..t.rows.len() {
        if t.basis[r] < art_start {
            continue;
        }
        let pivot_col = (0..art_start).find(|&j| !t.in_basis[j] && t.rows[r][j].abs() > PIVOT_TOL);
        match pivot_col {
            Some(j) => {
                let v = if t.at_upper[j] { t.upper[j] } else { 0.0 };
                t.pivot(r, j, v);
            }
            None => drop_rows.push(r),
        }
    }
    for &r in drop_rows.iter().rev() {
        t.in_basis[t.basis[r]] = false;
        t.rows.remove(r);
        t.beta.remove(r);
        t.basis.remove(r);
    }

    // Phase 2: artificials are pinned at zero and barred from entering;
    // minimize the true objective (negated when maximizing).
    for j in art_start..total {
        t.upper[j] = 0.0;
    }
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let true_cost: Vec<f64> = (0..total)
        .map(|j| if j < n { sign * lp.objective[j] } else { 0.0 })
        .collect();
    for j in 0..total {
        t.cost[j] = true_cost[j]
            - t.basis
                .iter()
                .enumerate()
                .map(|(i, &b)| true_cost[b] * t.rows[i][j])
                .sum::<f64>();
    }
    for &b in &t.basis {
        t.cost[b] = 0.0;
    }
    match t.run()? {
        Outcome::Optimal => {}
        Outcome::Unbounded => return Ok(LpSolution::unbounded()),
    }

    // Read the point off the tableau and evaluate the objective from
    // the original data rather than the updated cost row.
    let mut point = lo;
    for ((p, &at_upper), &upper) in point.iter_mut().zip(&t.at_upper).zip(&t.upper) {
        if at_upper {
            *p += upper;
        }
    }
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] += t.beta[i];
        }
    }
    let worst = lp.max_violation(&point);
    if worst > FEASIBILITY_TOL {
        return Err(Error::Numerical(format!(
            "solution violates constraints by {worst:.3e}"
        )));
    }
    let objective_value = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    let active_constraints = lp.active_set(&point, FEASIBILITY_TOL);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point,
        objective_value,
        active_constraints,
    })
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// How far the entering variable can move before something blocks it.
enum Limit {
    /// It reaches its own opposite bound; statuses flip, no pivot.
    Flip,
    /// Basic variable in this row reaches a bound and leaves the basis.
    Row { row: usize, leaves_at_upper: bool },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Current value of the basic variable of each row.
    beta: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    in_basis: Vec<bool>,
    art_start: usize,
    iterations: usize,
}

impl Tableau {
    /// Run simplex iterations until optimal or unbounded. Artificial
    /// columns never enter: they start basic in phase 1 and once driven
    /// out they stay out.
    fn run(&mut self) -> Result<Outcome> {
        loop {
            self.iterations += 1;
            if self.iterations > MAX_ITER {
                return Err(Error::Numerical(format!(
                    "no convergence after {MAX_ITER} simplex iterations"
                )));
            }
            // Entering column: Bland's rule, smallest eligible index.
            let mut entering = None;
            for j in 0..self.art_start {
                if self.in_basis[j] || self.upper[j] <= RATIO_TIE {
                    continue;
                }
                let improves = if self.at_upper[j] {
                    self.cost[j] > COST_TOL
                } else {
                    self.cost[j] < -COST_TOL
                };
                if improves {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };
            let sigma = if self.at_upper[q] { -1.0 } else { 1.0 };

            let mut step = self.upper[q];
            let mut limit = Limit::Flip;
            let mut blocking_var = usize::MAX;
            for i in 0..self.rows.len() {
                let rate = sigma * self.rows[i][q];
                let (ratio, leaves_at_upper) = if rate > PIVOT_TOL {
                    ((self.beta[i] / rate).max(0.0), false)
                } else if rate < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                    (
                        ((self.upper[self.basis[i]] - self.beta[i]) / -rate).max(0.0),
                        true,
                    )
                } else {
                    continue;
                };
                let replace = ratio < step - RATIO_TIE
                    || (ratio < step + RATIO_TIE && self.basis[i] < blocking_var);
                if replace {
                    step = step.min(ratio);
                    limit = Limit::Row {
                        row: i,
                        leaves_at_upper,
                    };
                    blocking_var = self.basis[i];
                }
            }
            if step.is_infinite() {
                return Ok(Outcome::Unbounded);
            }

            for i in 0..self.rows.len() {
                self.beta[i] -= step * sigma * self.rows[i][q];
                if self.beta[i] < 0.0 && self.beta[i] > -FEASIBILITY_TOL {
                    self.beta[i] = 0.0;
                }
            }
            let start = if self.at_upper[q] { self.upper[q] } else { 0.0 };
            let entering_value = start + sigma * step;
            match limit {
                Limit::Flip => {
                    self.at_upper[q] = !self.at_upper[q];
                }
                Limit::Row {
                    row,
                    leaves_at_upper,
                } => {
                    let leaving = self.basis[row];
                    self.at_upper[leaving] = leaves_at_upper;
                    self.pivot(row, q, entering_value);
                }
            }
        }
    }

    /// Make column `q` basic in row `r` with value `value`, eliminating
    /// it everywhere else including the cost row.
    fn pivot(&mut self, r: usize, q: usize, value: f64) {
        let p = self.rows[r][q];
        debug_assert!(p.abs() > PIVOT_TOL);
        for v in &mut self.rows[r] {
            *v /= p;
        }
        self.rows[r][q] = 1.0;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][q];
            if factor != 0.0 {
                for j in 0..self.cost.len() {
                    self.rows[i][j] -= factor * self.rows[r][j];
                }
                self.rows[i][q] = 0.0;
            }
        }
        let factor = self.cost[q];
        if factor != 0.0 {
            for j in 0..self.cost.len() {
                self.cost[j] -= factor * self.rows[r][j];
            }
        }
        self.cost[q] = 0.0;

        let leaving = self.basis[r];
        self.in_basis[leaving] = false;
        self.in_basis[q] = true;
        self.at_upper[q] = false;
        self.basis[r] = q;
        self.beta[r] = value;
    }
}
