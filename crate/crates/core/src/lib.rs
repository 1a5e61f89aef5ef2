//! Loan-portfolio optimization and liquidation planning for a bank with
//! limited liability facing liquidity risk.
//!
//! The balance sheet is normalized to one unit of assets funded by equity
//! `e` and deposits `1 - e`, invested across a universe of loan classes
//! (a safe class plus risky classes ordered by haircut). The timeline has
//! three dates: at `t = 0` the bank picks portfolio weights and equity;
//! at `t = 1` a fraction of deposits is withdrawn and part of the
//! portfolio may have to be sold at a haircut to raise the cash; at
//! `t = 2` loans mature or default and the bank either covers its
//! remaining liability or is insolvent.
//!
//! Four models are provided:
//!
//! * **Model 1** ([`invest`]): choose weights and equity maximizing the
//!   limited-liability payoff, subject to a risk bound, a capital rule
//!   with a leverage floor, and a cap on the total portfolio haircut.
//! * **Model 2**: Model 1 without the haircut cap.
//! * **Model 3** ([`liquidation`]): choose liquidation fractions
//!   minimizing the haircut loss while raising exactly the withdrawn
//!   cash, subject to a floor on the risk sold off.
//! * **Model 4**: Model 3 without the risk floor.
//!
//! [`analysis`] adds sensitivity sweeps and cross-model comparisons, all
//! backed by a dense bounded-variable simplex and a polytope vertex
//! enumerator in [`lp`]. Every solver is deterministic, and every result
//! type is immutable after construction (plain data, no interior
//! mutability), so values are safe to share across threads.

pub mod analysis;
pub mod bank;
pub mod capital;
pub mod error;
pub mod invest;
pub mod liquidation;
pub mod loan;
pub mod lp;
pub mod portfolio;
pub mod scenario;

pub use bank::BankConfig;
pub use error::{Error, Result};
pub use invest::{
    build_invest_problem, grid_oracle, solve_invest, InvestParams, InvestProblem, InvestSolution,
};
pub use liquidation::{
    build_liquidation_problem, detect_shortfall, post_liquidation_state, solve_liquidation,
    LiquidationProblem, PostLiquidationState,
};
pub use loan::{LoanClass, LoanUniverse};
pub use lp::{enumerate_vertices, solve_lp, LinearProgram, LpSolution, LpStatus};
pub use portfolio::{InvestmentDecision, LiquidationPlan};
pub use scenario::{
    enumerate_scenarios, limited_liability_payoff, portfolio_realization, Scenario, ScenarioSet,
};

/// Absolute tolerance for feasibility checks on constraints.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Vertices closer than this in the L-infinity norm are duplicates.
pub const VERTEX_DEDUP_TOL: f64 = 1e-8;

/// Tolerance when comparing two independent routes to the same optimum.
pub const OPTIMALITY_TOL: f64 = 1e-8;
