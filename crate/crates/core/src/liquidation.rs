//! Liquidation planning at the intermediate date.
//!
//! When withdrawals outrun renewals the bank must raise the gap in cash
//! by selling loans at their haircut prices. The plan minimizes the
//! total haircut loss subject to raising the cash exactly; the
//! risk-floor variant additionally requires the sales to shed at least
//! a given amount of expected loss, forcing the bank to deleverage
//! rather than dump only its safest, cheapest-to-sell assets.

use serde::Serialize;

use crate::bank::BankConfig;
use crate::capital::expected_loss;
use crate::error::{Error, Result};
use crate::loan::LoanUniverse;
use crate::lp::{solve_lp, Direction, Equality, Inequality, LinearProgram, LpStatus, Sense};
use crate::portfolio::{InvestmentDecision, LiquidationPlan};
use crate::scenario::enumerate_scenarios;

/// Cash the bank must raise at the intermediate date, per unit of
/// balance sheet; `None` when renewals cover withdrawals.
pub fn detect_shortfall(config: &BankConfig, equity: f64) -> Option<f64> {
    debug_assert!(equity > 0.0 && equity <= 1.0);
    if config.alpha_d >= config.alpha_w {
        return None;
    }
    Some((config.alpha_w - config.alpha_d) * (1.0 - equity))
}

/// A validated liquidation problem: a portfolio, a cash target known to
/// be raisable, and an optional floor on the expected loss to shed.
#[derive(Debug, Clone)]
pub struct LiquidationProblem {
    investment: InvestmentDecision,
    universe: LoanUniverse,
    required_cash: f64,
    risk_floor: Option<f64>,
}

impl LiquidationProblem {
    pub fn new(
        investment: InvestmentDecision,
        universe: LoanUniverse,
        required_cash: f64,
        risk_floor: Option<f64>,
    ) -> Result<Self> {
        if investment.weights().len() != universe.len() {
            return Err(Error::DimensionMismatch {
                expected: universe.len(),
                actual: investment.weights().len(),
            });
        }
        if !(required_cash.is_finite() && required_cash >= 0.0) {
            return Err(Error::invalid(
                "required_cash",
                format!("must be non-negative (got {required_cash})"),
            ));
        }
        if let Some(floor) = risk_floor {
            if !(floor.is_finite() && floor >= 0.0) {
                return Err(Error::invalid(
                    "risk_floor",
                    format!("must be non-negative (got {floor})"),
                ));
            }
        }
        let max_raisable: f64 = investment
            .weights()
            .iter()
            .zip(universe.loans())
            .map(|(x, loan)| x * (1.0 - loan.haircut) * (1.0 + loan.rate / 2.0))
            .sum();
        if required_cash > max_raisable + 1e-12 {
            return Err(Error::InsufficientLiquidity {
                required: required_cash,
                max_raisable,
                gap: required_cash - max_raisable,
            });
        }
        Ok(Self {
            investment,
            universe,
            required_cash,
            risk_floor,
        })
    }

    pub fn investment(&self) -> &InvestmentDecision {
        &self.investment
    }

    pub fn universe(&self) -> &LoanUniverse {
        &self.universe
    }

    pub fn required_cash(&self) -> f64 {
        self.required_cash
    }

    pub fn risk_floor(&self) -> Option<f64> {
        self.risk_floor
    }

    /// The plan as a linear program over the sale fractions: minimize
    /// the haircut loss, raise the cash exactly, sell no more than is
    /// held, and shed at least the risk floor when one applies.
    pub fn linear_program(&self) -> LinearProgram {
        let n = self.universe.len();
        let objective: Vec<f64> = self.universe.loans().iter().map(|l| l.haircut).collect();
        let cash: Vec<f64> = self
            .universe
            .loans()
            .iter()
            .map(|l| (1.0 - l.haircut) * (1.0 + l.rate / 2.0))
            .collect();
        let mut inequalities = Vec::new();
        if let Some(floor) = self.risk_floor {
            inequalities.push(Inequality {
                coeffs: self.universe.loans().iter().map(expected_loss).collect(),
                rhs: floor,
                direction: Direction::Ge,
            });
        }
        let bounds = (0..n)
            .map(|j| (0.0, self.investment.weights()[j]))
            .collect();
        LinearProgram {
            sense: Sense::Minimize,
            objective,
            equalities: vec![Equality {
                coeffs: cash,
                rhs: self.required_cash,
            }],
            inequalities,
            bounds,
        }
    }
}

/// Build the liquidation problem implied by a bank configuration: the
/// cash target is the net withdrawal against the invested portfolio.
pub fn build_liquidation_problem(
    investment: &InvestmentDecision,
    universe: &LoanUniverse,
    config: &BankConfig,
    use_risk_floor: bool,
) -> Result<LiquidationProblem> {
    config.validate(universe.len())?;
    let required = detect_shortfall(config, investment.equity()).ok_or(Error::NoShortfall)?;
    LiquidationProblem::new(
        investment.clone(),
        universe.clone(),
        required,
        use_risk_floor.then_some(config.theta2),
    )
}

/// Solve for the loss-minimal plan. When the risk floor makes the
/// problem infeasible the error reports the largest risk reduction any
/// cash-raising plan could achieve.
pub fn solve_liquidation(problem: &LiquidationProblem) -> Result<LiquidationPlan> {
    let lp = problem.linear_program();
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            LiquidationPlan::new(sol.point, &problem.universe, &problem.investment)
        }
        LpStatus::Infeasible => {
            let Some(floor) = problem.risk_floor else {
                // the constructor proved the cash target raisable, so
                // without a floor the program cannot be infeasible
                return Err(Error::Numerical(
                    "cash-matching plan not found despite liquidity check".into(),
                ));
            };
            let mut relaxed = lp;
            relaxed.inequalities.clear();
            relaxed.sense = Sense::Maximize;
            relaxed.objective = problem.universe.loans().iter().map(expected_loss).collect();
            let best = solve_lp(&relaxed)?;
            if best.status != LpStatus::Optimal {
                return Err(Error::Numerical(
                    "risk-reduction bound could not be computed".into(),
                ));
            }
            Err(Error::RiskFloorUnattainable {
                floor,
                max_achievable: best.objective_value,
            })
        }
        LpStatus::Unbounded => Err(Error::Numerical(
            "liquidation program reported unbounded, but sales are box-bounded".into(),
        )),
    }
}

/// Balance sheet after executing a plan, and the probability that the
/// remaining portfolio falls short of the remaining deposits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostLiquidationState {
    /// Holdings after sales, per loan class.
    pub remaining_weights: Vec<f64>,
    /// Deposits still owed at maturity after withdrawals and renewals.
    pub remaining_liability: f64,
    /// Probability the remaining portfolio's value at maturity is below
    /// the remaining liability.
    pub insolvency_probability: f64,
}

pub fn post_liquidation_state(
    decision: &InvestmentDecision,
    plan: &LiquidationPlan,
    universe: &LoanUniverse,
    config: &BankConfig,
) -> Result<PostLiquidationState> {
    config.validate(universe.len())?;
    if decision.weights().len() != universe.len() || plan.betas().len() != universe.len() {
        return Err(Error::DimensionMismatch {
            expected: universe.len(),
            actual: decision.weights().len().min(plan.betas().len()),
        });
    }
    let remaining_weights: Vec<f64> = decision
        .weights()
        .iter()
        .zip(plan.betas())
        .map(|(x, b)| (x - b).max(0.0))
        .collect();
    let remaining_liability = (1.0 - config.alpha_w + config.alpha_d) * (1.0 - decision.equity());
    let scenarios = enumerate_scenarios(universe)?;
    let mut insolvency_probability = 0.0;
    for s in scenarios.scenarios() {
        let value: f64 = remaining_weights
            .iter()
            .zip(&s.unit_payoffs)
            .map(|(w, v)| w * v)
            .sum();
        if value < remaining_liability - 1e-12 {
            insolvency_probability += s.probability;
        }
    }
    Ok(PostLiquidationState {
        remaining_weights,
        remaining_liability,
        insolvency_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loan::LoanClass;

    fn universe() -> LoanUniverse {
        LoanUniverse::new(vec![
            LoanClass {
                id: 0,
                rate: 0.03,
                pd: 0.0,
                lgd: 0.0,
                haircut: 0.0,
            },
            LoanClass {
                id: 1,
                rate: 0.09,
                pd: 0.061,
                lgd: 0.10,
                haircut: 0.10,
            },
            LoanClass {
                id: 2,
                rate: 0.132,
                pd: 0.122,
                lgd: 0.09,
                haircut: 0.20,
            },
        ])
        .unwrap()
    }

    fn config() -> BankConfig {
        BankConfig {
            delta: 1.04,
            k_lev: 0.04,
            theta1: 0.012,
            theta2: 0.0005,
            haircut_cap: 0.15,
            alpha_w: 0.10,
            alpha_d: 0.0,
            capital_charges: vec![0.0, 0.025, 0.03],
        }
    }

    fn capped_portfolio() -> InvestmentDecision {
        InvestmentDecision::new(vec![0.0291, 0.4418, 0.5291], 0.04).unwrap()
    }

    fn uncapped_portfolio() -> InvestmentDecision {
        InvestmentDecision::new(vec![0.0, 0.2778, 0.7222], 0.04).unwrap()
    }

    #[test]
    fn shortfall_is_the_net_withdrawal() {
        let c = config();
        assert!((detect_shortfall(&c, 0.04).unwrap() - 0.096).abs() < 1e-15);
        let mut covered = config();
        covered.alpha_d = 0.10;
        assert_eq!(detect_shortfall(&covered, 0.04), None);
        covered.alpha_d = 0.15;
        assert_eq!(detect_shortfall(&covered, 0.04), None);
    }

    #[test]
    fn loss_minimal_plan_sells_liquid_assets_first() {
        let p =
            build_liquidation_problem(&capped_portfolio(), &universe(), &config(), false).unwrap();
        let plan = solve_liquidation(&p).unwrap();
        // sell all of the safe class, then fill up with the next class
        let b1 = (0.096 - 0.0291 * 1.015) / 0.9405;
        assert!((plan.betas()[0] - 0.0291).abs() < 1e-9);
        assert!((plan.betas()[1] - b1).abs() < 1e-9);
        assert!((plan.betas()[2] - 0.0).abs() < 1e-9);
        assert!((b1 - 0.070668).abs() < 1e-6);
        assert!((plan.cash_raised() - 0.096).abs() < 1e-9);
        assert!((plan.haircut_loss() - 0.10 * b1).abs() < 1e-9);
    }

    #[test]
    fn risk_floor_shifts_sales_into_risky_classes() {
        let p =
            build_liquidation_problem(&capped_portfolio(), &universe(), &config(), true).unwrap();
        let plan = solve_liquidation(&p).unwrap();
        let b1 = 0.0005 / 0.0061;
        let b0 = (0.096 - 0.9405 * b1) / 1.015;
        assert!((plan.betas()[0] - b0).abs() < 1e-9);
        assert!((plan.betas()[1] - b1).abs() < 1e-9);
        assert!((plan.betas()[2] - 0.0).abs() < 1e-9);
        assert!((b0 - 0.018630).abs() < 1e-6);
        assert!((b1 - 0.081967).abs() < 1e-6);
        // risk shed is exactly the floor
        let shed = plan.betas()[1] * 0.0061 + plan.betas()[2] * 0.01098;
        assert!((shed - 0.0005).abs() < 1e-12);
    }

    #[test]
    fn tighter_floor_reaches_into_the_least_liquid_class() {
        let d = capped_portfolio();
        let p = LiquidationProblem::new(d, universe(), 0.096, Some(0.001)).unwrap();
        let plan = solve_liquidation(&p).unwrap();
        assert!((plan.betas()[0] - 0.0).abs() < 1e-9);
        assert!((plan.betas()[1] - 0.039277).abs() < 1e-6);
        assert!((plan.betas()[2] - 0.069254).abs() < 1e-6);
    }

    #[test]
    fn floor_already_met_changes_nothing() {
        // the loss-minimal plan for this portfolio sells 0.102073 of
        // class 1, shedding 0.000623 of risk, above the 0.0005 floor
        let without =
            build_liquidation_problem(&uncapped_portfolio(), &universe(), &config(), false)
                .unwrap();
        let with =
            build_liquidation_problem(&uncapped_portfolio(), &universe(), &config(), true).unwrap();
        let plan4 = solve_liquidation(&without).unwrap();
        let plan3 = solve_liquidation(&with).unwrap();
        assert!((plan4.betas()[1] - 0.102073).abs() < 1e-6);
        for (a, b) in plan3.betas().iter().zip(plan4.betas()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn floor_with_risk_above_reach_reports_the_bound() {
        let d = capped_portfolio();
        let p = LiquidationProblem::new(d, universe(), 0.096, Some(0.011)).unwrap();
        let err = solve_liquidation(&p).unwrap_err();
        match err {
            Error::RiskFloorUnattainable {
                floor,
                max_achievable,
            } => {
                assert_eq!(floor, 0.011);
                // best achievable: all cash from the riskiest class
                // first; 0.096/0.8528 = 0.112570 of class 2 sheds
                // 0.112570 * 0.01098 = 0.001236
                assert!((max_achievable - 0.0012360).abs() < 1e-6);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unraisable_cash_is_rejected_at_construction() {
        let d = InvestmentDecision::new(vec![0.0, 0.0, 1.0], 0.04).unwrap();
        // max raisable is 0.8528
        let err = LiquidationProblem::new(d, universe(), 0.9, None).unwrap_err();
        match err {
            Error::InsufficientLiquidity {
                required,
                max_raisable,
                gap,
            } => {
                assert_eq!(required, 0.9);
                assert!((max_raisable - 0.8528).abs() < 1e-9);
                assert!((gap - (0.9 - 0.8528)).abs() < 1e-9);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn renewals_covering_withdrawals_mean_no_problem_to_solve() {
        let mut c = config();
        c.alpha_d = 0.2;
        let err =
            build_liquidation_problem(&capped_portfolio(), &universe(), &c, false).unwrap_err();
        assert_eq!(err, Error::NoShortfall);
    }

    #[test]
    fn insolvency_probability_counts_joint_default_states() {
        let u = universe();
        let c = config();
        let d = capped_portfolio();
        let p = build_liquidation_problem(&d, &u, &c, false).unwrap();
        let plan = solve_liquidation(&p).unwrap();
        let state = post_liquidation_state(&d, &plan, &u, &c).unwrap();
        assert!((state.remaining_liability - 0.864).abs() < 1e-12);
        // only the both-default state drops below the liability
        assert!((state.insolvency_probability - 0.007442).abs() < 1e-9);

        let d2 = uncapped_portfolio();
        let p2 = build_liquidation_problem(&d2, &u, &c, false).unwrap();
        let plan2 = solve_liquidation(&p2).unwrap();
        let state2 = post_liquidation_state(&d2, &plan2, &u, &c).unwrap();
        // the riskier portfolio is insolvent whenever its dominant
        // class defaults: 0.114558 + 0.007442
        assert!((state2.insolvency_probability - 0.122).abs() < 1e-9);
    }

    #[test]
    fn zero_shortfall_solves_to_the_empty_plan() {
        let d = capped_portfolio();
        let p = LiquidationProblem::new(d, universe(), 0.0, None).unwrap();
        let plan = solve_liquidation(&p).unwrap();
        assert_eq!(plan.betas(), &[0.0, 0.0, 0.0]);
        assert_eq!(plan.haircut_loss(), 0.0);
    }
}
