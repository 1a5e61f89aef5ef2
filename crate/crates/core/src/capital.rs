//! Expected-loss risk measure and regulatory capital rules.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loan::{LoanClass, LoanUniverse};

/// Expected loss of one unit of a loan class: pd * lgd.
pub fn expected_loss(loan: &LoanClass) -> f64 {
    loan.pd * loan.lgd
}

/// Expected loss of the portfolio per unit of balance sheet.
pub fn portfolio_risk(weights: &[f64], universe: &LoanUniverse) -> Result<f64> {
    if weights.len() != universe.len() {
        return Err(Error::DimensionMismatch {
            expected: universe.len(),
            actual: weights.len(),
        });
    }
    Ok(weights
        .iter()
        .zip(universe.loans())
        .map(|(w, loan)| w * expected_loss(loan))
        .sum())
}

/// Risk-weighted capital requirement: the charge-weighted portfolio.
pub fn capital_requirement(weights: &[f64], charges: &[f64]) -> Result<f64> {
    if weights.len() != charges.len() {
        return Err(Error::DimensionMismatch {
            expected: charges.len(),
            actual: weights.len(),
        });
    }
    Ok(weights.iter().zip(charges).map(|(w, k)| w * k).sum())
}

/// Smallest admissible equity: the risk-weighted requirement, floored by
/// the leverage ratio.
pub fn equity_floor(weights: &[f64], charges: &[f64], k_lev: f64) -> Result<f64> {
    Ok(capital_requirement(weights, charges)?.max(k_lev))
}

/// Risk and capital figures for one weight vector, bundled for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskProfile {
    pub expected_losses: Vec<f64>,
    pub portfolio_risk: f64,
    pub capital_requirement: f64,
    pub equity_floor: f64,
}

impl RiskProfile {
    pub fn compute(
        weights: &[f64],
        universe: &LoanUniverse,
        charges: &[f64],
        k_lev: f64,
    ) -> Result<Self> {
        Ok(Self {
            expected_losses: universe.loans().iter().map(expected_loss).collect(),
            portfolio_risk: portfolio_risk(weights, universe)?,
            capital_requirement: capital_requirement(weights, charges)?,
            equity_floor: equity_floor(weights, charges, k_lev)?,
        })
    }
}
