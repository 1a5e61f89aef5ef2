//! Portfolio decisions: investment weights with equity, and liquidation
//! plans against those weights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loan::LoanUniverse;

/// Tolerance for the defensive range checks on constructor inputs.
/// Solver output sits on constraint boundaries up to roundoff, so exact
/// comparisons would spuriously reject valid points.
const INPUT_TOL: f64 = 1e-9;

/// Investment weights over the loan universe plus the equity share.
///
/// Weights sum to 1 (the whole balance sheet is invested) and equity is
/// the e in e + d = 1. Values are clamped into range after validation so
/// downstream code never sees -1e-16 where 0 is meant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestmentDecision {
    weights: Vec<f64>,
    equity: f64,
}

impl InvestmentDecision {
    pub fn new(weights: Vec<f64>, equity: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "must not be empty"));
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(-INPUT_TOL..=1.0 + INPUT_TOL).contains(&w) {
                return Err(Error::invalid(
                    "weights",
                    format!("weight {i} must lie in [0, 1] (got {w})"),
                ));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(
                "weights",
                format!("must sum to 1 (got {sum})"),
            ));
        }
        if !equity.is_finite() || equity <= 0.0 || equity > 1.0 + INPUT_TOL {
            return Err(Error::invalid(
                "equity",
                format!("must lie in (0, 1] (got {equity})"),
            ));
        }
        let weights = weights.into_iter().map(|w| w.clamp(0.0, 1.0)).collect();
        Ok(Self {
            weights,
            equity: equity.min(1.0),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn equity(&self) -> f64 {
        self.equity
    }

    pub fn deposits(&self) -> f64 {
        1.0 - self.equity
    }
}

/// Fractions of each loan class sold at the intermediate date, with the
/// haircut loss and cash proceeds implied by those sales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiquidationPlan {
    betas: Vec<f64>,
    haircut_loss: f64,
    cash_raised: f64,
}

impl LiquidationPlan {
    /// Build a plan, checking 0 <= beta_i <= x_i against the decision the
    /// plan liquidates. Proceeds are marked to market: selling beta_i of
    /// class i raises `beta_i * (1 - haircut_i) * (1 + rate_i / 2)` and
    /// burns `beta_i * haircut_i` of value.
    pub fn new(
        betas: Vec<f64>,
        universe: &LoanUniverse,
        decision: &InvestmentDecision,
    ) -> Result<Self> {
        if betas.len() != universe.len() {
            return Err(Error::DimensionMismatch {
                expected: universe.len(),
                actual: betas.len(),
            });
        }
        if decision.weights().len() != universe.len() {
            return Err(Error::DimensionMismatch {
                expected: universe.len(),
                actual: decision.weights().len(),
            });
        }
        let mut clamped = Vec::with_capacity(betas.len());
        for (i, (&b, &x)) in betas.iter().zip(decision.weights()).enumerate() {
            if !b.is_finite() || b < -INPUT_TOL || b > x + INPUT_TOL {
                return Err(Error::invalid(
                    "betas",
                    format!("sale {i} must lie in [0, {x}] (got {b})"),
                ));
            }
            clamped.push(b.clamp(0.0, x));
        }
        let mut haircut_loss = 0.0;
        let mut cash_raised = 0.0;
        for (b, loan) in clamped.iter().zip(universe.loans()) {
            haircut_loss += b * loan.haircut;
            cash_raised += b * (1.0 - loan.haircut) * (1.0 + loan.rate / 2.0);
        }
        Ok(Self {
            betas: clamped,
            haircut_loss,
            cash_raised,
        })
    }

    /// The plan that sells nothing.
    pub fn zero(n_loans: usize) -> Self {
        Self {
            betas: vec![0.0; n_loans],
            haircut_loss: 0.0,
            cash_raised: 0.0,
        }
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn haircut_loss(&self) -> f64 {
        self.haircut_loss
    }

    pub fn cash_raised(&self) -> f64 {
        self.cash_raised
    }
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

    #[test]
    fn decision_accepts_boundary_noise_and_clamps() {
        let d = InvestmentDecision::new(vec![-1e-12, 0.5, 0.5 + 1e-12], 0.04).unwrap();
        assert_eq!(d.weights()[0], 0.0);
        assert!((d.deposits() - 0.96).abs() < 1e-12);
    }

    #[test]
    fn decision_rejects_bad_sums_and_equity() {
        assert!(InvestmentDecision::new(vec![0.5, 0.4], 0.04).is_err());
        assert!(InvestmentDecision::new(vec![0.5, 0.5], 0.0).is_err());
        assert!(InvestmentDecision::new(vec![0.5, 0.5], 1.5).is_err());
        assert!(InvestmentDecision::new(vec![0.5, 0.5], f64::NAN).is_err());
    }

    #[test]
    fn plan_computes_loss_and_proceeds() {
        let u = universe();
        let d = InvestmentDecision::new(vec![0.25, 0.35, 0.40], 0.04).unwrap();
        let p = LiquidationPlan::new(vec![0.1, 0.2, 0.3], &u, &d).unwrap();
        // loss = 0.1*0 + 0.2*0.10 + 0.3*0.20
        assert!((p.haircut_loss() - 0.08).abs() < 1e-12);
        // cash = 0.1*1.015 + 0.2*0.9405 + 0.3*0.8528
        assert!((p.cash_raised() - (0.1 * 1.015 + 0.2 * 0.9405 + 0.3 * 0.8528)).abs() < 1e-12);
    }

    #[test]
    fn plan_rejects_sales_beyond_holdings() {
        let u = universe();
        let d = InvestmentDecision::new(vec![0.25, 0.35, 0.40], 0.04).unwrap();
        let err = LiquidationPlan::new(vec![0.3, 0.0, 0.0], &u, &d).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "betas"));
        assert!(LiquidationPlan::new(vec![0.1, 0.2], &u, &d).is_err());
    }

    #[test]
    fn zero_plan_is_neutral() {
        let p = LiquidationPlan::zero(3);
        assert_eq!(p.betas(), &[0.0, 0.0, 0.0]);
        assert_eq!(p.haircut_loss(), 0.0);
        assert_eq!(p.cash_raised(), 0.0);
    }
}
