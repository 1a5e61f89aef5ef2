//! Comparative statics and cross-model checks: how the optimal
//! portfolio responds to the liquidity cap, how liquidation responds to
//! the risk floor, and when the deleveraging plan dominates the
//! loss-minimal plan in the worst case.

use std::cmp::Ordering;

use serde::Serialize;

use crate::bank::BankConfig;
use crate::error::{Error, Result};
use crate::invest::{
    build_invest_problem, solve_invest, InvestParams, InvestProblem, InvestSolution,
};
use crate::liquidation::{
    build_liquidation_problem, detect_shortfall, post_liquidation_state, solve_liquidation,
    LiquidationProblem, PostLiquidationState,
};
use crate::loan::{LoanClass, LoanUniverse};
use crate::portfolio::{InvestmentDecision, LiquidationPlan};

/// Tolerance for the monotonicity and dominance comparisons; solver
/// output is exact to well below this.
const CHECK_TOL: f64 = 1e-9;

/// Gradient of the haircut loss with respect to the sale fractions.
/// The loss is linear, so the gradient is the haircut vector itself;
/// classes must come ordered by non-decreasing haircut.
pub fn haircut_loss_gradient(loans: &[LoanClass]) -> Vec<f64> {
    for pair in loans.windows(2) {
        assert!(
            pair[1].haircut >= pair[0].haircut,
            "loan classes must be ordered by non-decreasing haircut"
        );
    }
    loans.iter().map(|l| l.haircut).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CapSweepRow {
    pub cap: f64,
    pub solution: InvestSolution,
    /// Haircut the chosen portfolio would suffer if sold in full.
    pub haircut_used: f64,
}

/// Optimal investments along a tightening liquidity cap.
#[derive(Debug, Clone, Serialize)]
pub struct CapSweep {
    pub rows: Vec<CapSweepRow>,
    /// Whether the weight of the least liquid class never rises as the
    /// cap tightens.
    pub illiquid_weight_monotone: bool,
    /// Row indices where that monotonicity fails.
    pub violations: Vec<usize>,
}

/// Re-solve the investment problem for each cap in `grid`, which must
/// be strictly decreasing so the sweep reads as a tightening.
pub fn cap_sweep(universe: &LoanUniverse, config: &BankConfig, grid: &[f64]) -> Result<CapSweep> {
    config.validate(universe.len())?;
    if grid.is_empty() {
        return Err(Error::invalid("grid", "at least one cap required"));
    }
    for pair in grid.windows(2) {
        // partial_cmp so a NaN in the grid is rejected, not waved past
        if pair[1].partial_cmp(&pair[0]) != Some(Ordering::Less) {
            return Err(Error::invalid(
                "grid",
                format!(
                    "caps must decrease strictly (got {} then {})",
                    pair[0], pair[1]
                ),
            ));
        }
    }
    if grid.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::invalid(
            "grid",
            "caps must be finite and non-negative",
        ));
    }

    let mut rows = Vec::with_capacity(grid.len());
    for &cap in grid {
        let params = InvestParams {
            delta: config.delta,
            k_lev: config.k_lev,
            theta1: config.theta1,
            haircut_cap: Some(cap),
            capital_charges: config.capital_charges.clone(),
        };
        let problem = InvestProblem::new(universe.clone(), params)?;
        let solution = solve_invest(&problem)?;
        let haircut_used = solution
            .decision
            .weights()
            .iter()
            .zip(universe.loans())
            .map(|(w, l)| w * l.haircut)
            .sum();
        rows.push(CapSweepRow {
            cap,
            solution,
            haircut_used,
        });
    }

    let last = universe.len() - 1;
    let mut violations = Vec::new();
    for i in 1..rows.len() {
        let prev = rows[i - 1].solution.decision.weights()[last];
        let curr = rows[i].solution.decision.weights()[last];
        if curr > prev + CHECK_TOL {
            violations.push(i);
        }
    }
    Ok(CapSweep {
        illiquid_weight_monotone: violations.is_empty(),
        rows,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub enum FloorOutcome {
    Feasible {
        plan: LiquidationPlan,
        insolvency_probability: f64,
    },
    Infeasible {
        reason: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FloorSweepRow {
    pub theta2: f64,
    pub outcome: FloorOutcome,
}

/// Liquidation plans along a rising risk floor.
#[derive(Debug, Clone, Serialize)]
pub struct FloorSweep {
    pub rows: Vec<FloorSweepRow>,
    /// Whether sales of the safe class never rise as the floor rises,
    /// over the feasible rows.
    pub safe_liquidation_monotone: bool,
    /// Row indices where that monotonicity fails.
    pub violations: Vec<usize>,
}

/// Re-solve the liquidation problem for each floor in `grid`, which
/// must be strictly increasing. Floors are taken as given, so values
/// at or above the investment-stage risk bound are allowed here.
pub fn floor_sweep(
    investment: &InvestmentDecision,
    universe: &LoanUniverse,
    config: &BankConfig,
    grid: &[f64],
) -> Result<FloorSweep> {
    config.validate(universe.len())?;
    if grid.is_empty() {
        return Err(Error::invalid("grid", "at least one floor required"));
    }
    for pair in grid.windows(2) {
        // partial_cmp so a NaN in the grid is rejected, not waved past
        if pair[1].partial_cmp(&pair[0]) != Some(Ordering::Greater) {
            return Err(Error::invalid(
                "grid",
                format!(
                    "floors must increase strictly (got {} then {})",
                    pair[0], pair[1]
                ),
            ));
        }
    }
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::invalid(
            "grid",
            "floors must be finite and non-negative",
        ));
    }
    let required = detect_shortfall(config, investment.equity()).ok_or(Error::NoShortfall)?;

    let mut rows = Vec::with_capacity(grid.len());
    for &theta2 in grid {
        let problem =
            LiquidationProblem::new(investment.clone(), universe.clone(), required, Some(theta2))?;
        let outcome = match solve_liquidation(&problem) {
            Ok(plan) => {
                let state = post_liquidation_state(investment, &plan, universe, config)?;
                FloorOutcome::Feasible {
                    plan,
                    insolvency_probability: state.insolvency_probability,
                }
            }
            Err(err @ Error::RiskFloorUnattainable { .. }) => FloorOutcome::Infeasible {
                reason: err.to_string(),
            },
            Err(other) => return Err(other),
        };
        rows.push(FloorSweepRow { theta2, outcome });
    }

    let mut violations = Vec::new();
    let mut prev_safe: Option<f64> = None;
    for (i, row) in rows.iter().enumerate() {
        let FloorOutcome::Feasible { plan, .. } = &row.outcome else {
            break; // floors only tighten, so the feasible rows are a prefix
        };
        let safe = plan.betas()[0];
        if let Some(prev) = prev_safe {
            if safe > prev + CHECK_TOL {
                violations.push(i);
            }
        }
        prev_safe = Some(safe);
    }
    Ok(FloorSweep {
        safe_liquidation_monotone: violations.is_empty(),
        rows,
        violations,
    })
}

/// Worst-case comparison of the deleveraging plan (`with_floor`)
/// against the loss-minimal plan (`without_floor`).
///
/// In the all-defaults state the remaining portfolio under the floor is
/// worth at least as much exactly when the extra safe assets it keeps
/// outweigh the extra risky recovery it gives up, which is the
/// condition reported here. `lhs - rhs` equals the value difference by
/// construction, so `condition_holds` and `realization_dominates` agree
/// up to roundoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCheck {
    /// Safe value kept: `(b4_0 - b3_0) * (1 + r_0)`.
    pub lhs: f64,
    /// Risky recovery given up: `sum_i (b3_i - b4_i) * (1 - lgd_i)`.
    pub rhs: f64,
    pub condition_holds: bool,
    /// Remaining portfolio value in the all-defaults state, per plan.
    pub with_floor_worst: f64,
    pub without_floor_worst: f64,
    pub realization_dominates: bool,
}

pub fn worst_case_dominance(
    investment: &InvestmentDecision,
    universe: &LoanUniverse,
    with_floor: &LiquidationPlan,
    without_floor: &LiquidationPlan,
) -> Result<DominanceCheck> {
    let n = universe.len();
    if investment.weights().len() != n
        || with_floor.betas().len() != n
        || without_floor.betas().len() != n
    {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: investment.weights().len(),
        });
    }
    let worst_payoff: Vec<f64> = universe
        .loans()
        .iter()
        .map(|l| {
            if l.is_safe() {
                1.0 + l.rate
            } else {
                1.0 - l.lgd
            }
        })
        .collect();
    let b3 = with_floor.betas();
    let b4 = without_floor.betas();
    let lhs = (b4[0] - b3[0]) * worst_payoff[0];
    let rhs: f64 = (1..n).map(|i| (b3[i] - b4[i]) * worst_payoff[i]).sum();
    let value = |betas: &[f64]| -> f64 {
        investment
            .weights()
            .iter()
            .zip(betas)
            .zip(&worst_payoff)
            .map(|((x, b), v)| (x - b) * v)
            .sum()
    };
    let with_floor_worst = value(b3);
    let without_floor_worst = value(b4);
    Ok(DominanceCheck {
        lhs,
        rhs,
        condition_holds: lhs >= rhs - CHECK_TOL,
        with_floor_worst,
        without_floor_worst,
        realization_dominates: with_floor_worst >= without_floor_worst - CHECK_TOL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub enum LiquidationOutcome {
    Plan {
        plan: LiquidationPlan,
        state: PostLiquidationState,
    },
    /// Renewals cover withdrawals; nothing needs to be sold.
    NoShortfall,
    Infeasible {
        reason: String,
    },
}

/// Liquidation results for one investment decision, with and without
/// the risk floor.
#[derive(Debug, Clone, Serialize)]
pub struct ModelLiquidation {
    pub with_floor: LiquidationOutcome,
    pub without_floor: LiquidationOutcome,
    /// Worst-case comparison when both plans exist.
    pub dominance: Option<DominanceCheck>,
}

/// All four model combinations on one configuration: investment with
/// and without the liquidity cap, each followed by liquidation with and
/// without the risk floor.
#[derive(Debug, Clone, Serialize)]
pub struct ModelComparison {
    pub with_cap: InvestSolution,
    pub without_cap: InvestSolution,
    pub with_cap_liquidation: ModelLiquidation,
    pub without_cap_liquidation: ModelLiquidation,
    /// Whether the cap lowered the weight of the least liquid class.
    pub illiquid_weight_reduced: bool,
}

pub fn compare_models(universe: &LoanUniverse, config: &BankConfig) -> Result<ModelComparison> {
    let with_cap = solve_invest(&build_invest_problem(universe, config, true)?)?;
    let without_cap = solve_invest(&build_invest_problem(universe, config, false)?)?;

    let liquidate = |solution: &InvestSolution| -> Result<ModelLiquidation> {
        let decision = &solution.decision;
        let run = |use_floor: bool| -> Result<LiquidationOutcome> {
            let problem = match build_liquidation_problem(decision, universe, config, use_floor) {
                Ok(p) => p,
                Err(Error::NoShortfall) => return Ok(LiquidationOutcome::NoShortfall),
                Err(err @ Error::InsufficientLiquidity { .. }) => {
                    return Ok(LiquidationOutcome::Infeasible {
                        reason: err.to_string(),
                    })
                }
                Err(other) => return Err(other),
            };
            match solve_liquidation(&problem) {
                Ok(plan) => {
                    let state = post_liquidation_state(decision, &plan, universe, config)?;
                    Ok(LiquidationOutcome::Plan { plan, state })
                }
                Err(err @ Error::RiskFloorUnattainable { .. }) => {
                    Ok(LiquidationOutcome::Infeasible {
                        reason: err.to_string(),
                    })
                }
                Err(other) => Err(other),
            }
        };
        let with_floor = run(true)?;
        let without_floor = run(false)?;
        let dominance = match (&with_floor, &without_floor) {
            (
                LiquidationOutcome::Plan { plan: p3, .. },
                LiquidationOutcome::Plan { plan: p4, .. },
            ) => Some(worst_case_dominance(decision, universe, p3, p4)?),
            _ => None,
        };
        Ok(ModelLiquidation {
            with_floor,
            without_floor,
            dominance,
        })
    };

    let with_cap_liquidation = liquidate(&with_cap)?;
    let without_cap_liquidation = liquidate(&without_cap)?;
    let last = universe.len() - 1;
    let illiquid_weight_reduced =
        with_cap.decision.weights()[last] <= without_cap.decision.weights()[last] + CHECK_TOL;
    Ok(ModelComparison {
        with_cap,
        without_cap,
        with_cap_liquidation,
        without_cap_liquidation,
        illiquid_weight_reduced,
    })
}
