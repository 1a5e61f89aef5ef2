//! Portfolio selection at the initial date.
//!
//! The bank maximizes the expected shareholder payoff under limited
//! liability, choosing weights over the loan classes and an equity
//! level. The feasible region is a polytope (budget, capital rule,
//! expected-loss bound and optionally a liquidity cap on the total
//! haircut), but limited liability makes the objective piecewise linear
//! and convex in the weights, so the optimum sits at a vertex: we
//! enumerate vertices and evaluate the exact objective at each. A
//! brute-force simplex-grid oracle provides an independent check.

use serde::Serialize;

use crate::bank::BankConfig;
use crate::capital::{self, expected_loss};
use crate::error::{Error, Result};
use crate::loan::LoanUniverse;
use crate::lp::{enumerate_vertices, Direction, Equality, Inequality, LinearProgram, Sense};
use crate::portfolio::InvestmentDecision;
use crate::scenario::{enumerate_scenarios, limited_liability_payoff, ScenarioSet};
use crate::FEASIBILITY_TOL;

/// Objective gap under which two candidate optima count as tied; ties
/// go to the lexicographically smallest `(weights, equity)` vector so
/// both solution routes pick the same point.
const TIE_TOL: f64 = 1e-12;
/// Hard cap on grid points the oracle will evaluate.
const MAX_GRID_POINTS: u128 = 5_000_000;

/// Parameters of the investment problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestParams {
    /// Opportunity cost of equity, at least 1.
    pub delta: f64,
    /// Leverage-ratio floor on equity.
    pub k_lev: f64,
    /// Cap on the expected loss of the portfolio.
    pub theta1: f64,
    /// Cap on the total haircut the portfolio could suffer if sold in
    /// full; `None` drops the constraint.
    pub haircut_cap: Option<f64>,
    /// Per-unit capital charge of each loan class.
    pub capital_charges: Vec<f64>,
}

/// A validated investment problem over a loan universe.
#[derive(Debug, Clone)]
pub struct InvestProblem {
    universe: LoanUniverse,
    params: InvestParams,
    scenarios: ScenarioSet,
}

impl InvestProblem {
    pub fn new(universe: LoanUniverse, params: InvestParams) -> Result<Self> {
        if !(params.delta.is_finite() && params.delta >= 1.0) {
            return Err(Error::invalid(
                "delta",
                format!("must be finite and at least 1 (got {})", params.delta),
            ));
        }
        if !(params.k_lev.is_finite() && params.k_lev > 0.0 && params.k_lev <= 1.0) {
            return Err(Error::invalid(
                "k_lev",
                format!("must lie in (0, 1] (got {})", params.k_lev),
            ));
        }
        if !(params.theta1.is_finite() && params.theta1 >= 0.0) {
            return Err(Error::invalid(
                "theta1",
                format!("must be non-negative (got {})", params.theta1),
            ));
        }
        if let Some(cap) = params.haircut_cap {
            if !(cap.is_finite() && cap >= 0.0) {
                return Err(Error::invalid(
                    "haircut_cap",
                    format!("must be non-negative (got {cap})"),
                ));
            }
        }
        if params.capital_charges.len() != universe.len() {
            return Err(Error::DimensionMismatch {
                expected: universe.len(),
                actual: params.capital_charges.len(),
            });
        }
        for (i, &k) in params.capital_charges.iter().enumerate() {
            if !(k.is_finite() && (0.0..=1.0).contains(&k)) {
                return Err(Error::invalid(
                    "capital_charges",
                    format!("charge {i} must lie in [0, 1] (got {k})"),
                ));
            }
        }
        let scenarios = enumerate_scenarios(&universe)?;
        Ok(Self {
            universe,
            params,
            scenarios,
        })
    }

    pub fn universe(&self) -> &LoanUniverse {
        &self.universe
    }

    pub fn params(&self) -> &InvestParams {
        &self.params
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    /// The feasible region as an explicit linear program over the
    /// variables `(x_0, .., x_{n-1}, e)`. The linear objective is the
    /// expected portfolio payoff net of equity cost, which ignores the
    /// limited-liability kink; vertex enumeration evaluates the true
    /// objective separately.
    pub fn linear_program(&self) -> LinearProgram {
        let n = self.universe.len();
        let mut objective = vec![0.0; n + 1];
        for s in self.scenarios.scenarios() {
            for (obj, payoff) in objective.iter_mut().zip(&s.unit_payoffs) {
                *obj += s.probability * payoff;
            }
        }
        objective[n] = -self.params.delta;

        let row = |coeffs: Vec<f64>, rhs: f64, direction: Direction| Inequality {
            coeffs,
            rhs,
            direction,
        };
        let mut inequalities = Vec::new();
        for j in 0..n {
            let mut unit = vec![0.0; n + 1];
            unit[j] = 1.0;
            inequalities.push(row(unit, 0.0, Direction::Ge));
        }
        for j in 0..n {
            let mut unit = vec![0.0; n + 1];
            unit[j] = 1.0;
            inequalities.push(row(unit, 1.0, Direction::Le));
        }
        let mut capital = vec![0.0; n + 1];
        capital[..n].copy_from_slice(&self.params.capital_charges);
        capital[n] = -1.0;
        inequalities.push(row(capital, 0.0, Direction::Le));
        let mut risk = vec![0.0; n + 1];
        for (j, loan) in self.universe.loans().iter().enumerate() {
            risk[j] = expected_loss(loan);
        }
        inequalities.push(row(risk, self.params.theta1, Direction::Le));
        if let Some(cap) = self.params.haircut_cap {
            let mut haircut = vec![0.0; n + 1];
            for (j, loan) in self.universe.loans().iter().enumerate() {
                haircut[j] = loan.haircut;
            }
            inequalities.push(row(haircut, cap, Direction::Le));
        }

        let mut budget = vec![1.0; n + 1];
        budget[n] = 0.0;
        let mut bounds = vec![(0.0, 1.0); n];
        bounds.push((self.params.k_lev, 1.0));
        LinearProgram {
            sense: Sense::Maximize,
            objective,
            equalities: vec![Equality {
                coeffs: budget,
                rhs: 1.0,
            }],
            inequalities,
            bounds,
        }
    }

    /// Exact shareholder objective at a candidate point.
    pub fn objective(&self, weights: &[f64], equity: f64) -> Result<f64> {
        let decision = InvestmentDecision::new(weights.to_vec(), equity)?;
        limited_liability_payoff(&decision, &self.scenarios, self.params.delta)
    }

    /// Direct feasibility check, independent of the LP encoding.
    pub fn is_feasible(&self, weights: &[f64], equity: f64, tol: f64) -> bool {
        let n = self.universe.len();
        if weights.len() != n || !equity.is_finite() {
            return false;
        }
        if weights
            .iter()
            .any(|w| !w.is_finite() || *w < -tol || *w > 1.0 + tol)
        {
            return false;
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return false;
        }
        let requirement = capital::capital_requirement(weights, &self.params.capital_charges)
            .expect("lengths checked above");
        if requirement > equity + tol {
            return false;
        }
        let risk = capital::portfolio_risk(weights, &self.universe).expect("lengths checked");
        if risk > self.params.theta1 + tol {
            return false;
        }
        if let Some(cap) = self.params.haircut_cap {
            let haircut: f64 = weights
                .iter()
                .zip(self.universe.loans())
                .map(|(w, l)| w * l.haircut)
                .sum();
            if haircut > cap + tol {
                return false;
            }
        }
        equity >= self.params.k_lev - tol && equity <= 1.0 + tol
    }

    /// Names of the constraints active at a point, for reporting.
    pub fn binding_constraints(&self, weights: &[f64], equity: f64, tol: f64) -> Vec<String> {
        let n = self.universe.len();
        debug_assert_eq!(weights.len(), n);
        let mut names = vec!["weights_sum".to_string()];
        for (j, &w) in weights.iter().enumerate() {
            if w.abs() <= tol {
                names.push(format!("weight_floor[{j}]"));
            }
        }
        for (j, &w) in weights.iter().enumerate() {
            if (w - 1.0).abs() <= tol {
                names.push(format!("weight_cap[{j}]"));
            }
        }
        let requirement = capital::capital_requirement(weights, &self.params.capital_charges)
            .expect("lengths checked by callers");
        if (requirement - equity).abs() <= tol {
            names.push("capital_rule".to_string());
        }
        let risk = capital::portfolio_risk(weights, &self.universe).expect("lengths checked");
        if (risk - self.params.theta1).abs() <= tol {
            names.push("risk_bound".to_string());
        }
        if let Some(cap) = self.params.haircut_cap {
            let haircut: f64 = weights
                .iter()
                .zip(self.universe.loans())
                .map(|(w, l)| w * l.haircut)
                .sum();
            if (haircut - cap).abs() <= tol {
                names.push("haircut_cap".to_string());
            }
        }
        if (equity - self.params.k_lev).abs() <= tol {
            names.push("leverage_floor".to_string());
        }
        if (equity - 1.0).abs() <= tol {
            names.push("equity_cap".to_string());
        }
        names
    }
}

/// Build the investment problem a bank configuration describes,
/// with or without the liquidity cap on haircuts.
pub fn build_invest_problem(
    universe: &LoanUniverse,
    config: &BankConfig,
    include_haircut_cap: bool,
) -> Result<InvestProblem> {
    config.validate(universe.len())?;
    let params = InvestParams {
        delta: config.delta,
        k_lev: config.k_lev,
        theta1: config.theta1,
        haircut_cap: include_haircut_cap.then_some(config.haircut_cap),
        capital_charges: config.capital_charges.clone(),
    };
    InvestProblem::new(universe.clone(), params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestDiagnostics {
    /// Candidate points the route examined (vertices, or feasible grid
    /// points for the oracle).
    pub vertex_count: usize,
    /// Objective shortfall of an independent check run, when one ran.
    pub oracle_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvestSolution {
    pub decision: InvestmentDecision,
    pub objective_value: f64,
    pub binding_constraints: Vec<String>,
    pub diagnostics: InvestDiagnostics,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Maximize the shareholder objective over the feasible polytope by
/// evaluating it at every vertex. Exact for this objective: it is
/// convex on the feasible region, so some vertex attains the maximum.
pub fn solve_invest(problem: &InvestProblem) -> Result<InvestSolution> {
    let n = problem.universe.len();
    let lp = problem.linear_program();
    let vertices = enumerate_vertices(&lp)?;
    if vertices.is_empty() {
        return Err(Error::Infeasible(
            "no feasible investment satisfies the constraints".into(),
        ));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for v in &vertices {
        let value = problem.objective(&v[..n], v[n])?;
        let replace = match &best {
            None => true,
            Some((point, obj)) => {
                value > obj + TIE_TOL || (value >= obj - TIE_TOL && lex_less(v, point))
            }
        };
        if replace {
            best = Some((v.clone(), value));
        }
    }
    let (point, objective_value) = best.expect("vertex list is non-empty");
    let binding_constraints = problem.binding_constraints(&point[..n], point[n], FEASIBILITY_TOL);
    let decision = InvestmentDecision::new(point[..n].to_vec(), point[n])?;
    Ok(InvestSolution {
        decision,
        objective_value,
        binding_constraints,
        diagnostics: InvestDiagnostics {
            vertex_count: vertices.len(),
            oracle_gap: None,
        },
    })
}

/// Brute-force check: scan portfolio weights on a simplex grid with the
/// given step, pairing each with its smallest admissible equity (the
/// objective never increases in equity when delta is at least 1). The
/// result lower-bounds the true optimum within the grid resolution.
pub fn grid_oracle(problem: &InvestProblem, step: f64) -> Result<InvestSolution> {
    if !(step.is_finite() && step > 0.0 && step <= 0.1) {
        return Err(Error::invalid(
            "step",
            format!("must lie in (0, 0.1] (got {step})"),
        ));
    }
    let n = problem.universe.len();
    let m = (1.0 / step).round() as usize;
    let mut count: u128 = 1;
    for i in 1..n {
        count = count.saturating_mul((m + i) as u128) / i as u128;
        if count > MAX_GRID_POINTS {
            return Err(Error::invalid(
                "step",
                format!("grid would exceed {MAX_GRID_POINTS} points"),
            ));
        }
    }

    let charges = &problem.params.capital_charges;
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let mut feasible_points = 0usize;
    let mut weights = vec![0.0; n];
    let mut counts = vec![0usize; n];
    visit_compositions(m, 0, &mut counts, &mut |counts| {
        for (w, &c) in weights.iter_mut().zip(counts.iter()) {
            *w = c as f64 / m as f64;
        }
        let equity =
            capital::equity_floor(&weights, charges, problem.params.k_lev).expect("lengths match");
        if !problem.is_feasible(&weights, equity, FEASIBILITY_TOL) {
            return;
        }
        feasible_points += 1;
        let value = problem
            .objective(&weights, equity)
            .expect("feasible points evaluate");
        let replace = match &best {
            None => true,
            Some((bw, be, bv)) => {
                value > bv + TIE_TOL
                    || (value >= bv - TIE_TOL
                        && lex_less(
                            &[weights.as_slice(), &[equity]].concat(),
                            &[bw.as_slice(), &[*be]].concat(),
                        ))
            }
        };
        if replace {
            best = Some((weights.clone(), equity, value));
        }
    });

    let Some((weights, equity, objective_value)) = best else {
        return Err(Error::Infeasible(
            "no grid point satisfies the constraints".into(),
        ));
    };
    let binding_constraints = problem.binding_constraints(&weights, equity, FEASIBILITY_TOL);
    Ok(InvestSolution {
        decision: InvestmentDecision::new(weights, equity)?,
        objective_value,
        binding_constraints,
        diagnostics: InvestDiagnostics {
            vertex_count: feasible_points,
            oracle_gap: None,
        },
    })
}

/// Visit every way of splitting `remaining` grid ticks over
/// `counts[from..]`, invoking the callback with the full vector.
fn visit_compositions(
    remaining: usize,
    from: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if from == counts.len() - 1 {
        counts[from] = remaining;
        visit(counts.as_slice());
        return;
    }
    for take in 0..=remaining {
        counts[from] = take;
        visit_compositions(remaining - take, from + 1, counts, visit);
    }
}
