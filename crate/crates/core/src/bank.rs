//! Bank-level configuration: funding mix, regulatory bounds and
//! withdrawal assumptions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters describing the bank and its regulatory environment.
///
/// The balance sheet is normalized to 1, so equity `e` and deposits
/// `1 - e` are fractions. `capital_charges[i]` is the per-unit capital
/// charge of loan class `i`; the leverage floor `k_lev` applies when the
/// weighted charge is smaller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankConfig {
    /// Opportunity cost of equity per unit, at least 1.
    pub delta: f64,
    /// Leverage-ratio floor on equity.
    pub k_lev: f64,
    /// Cap on expected portfolio loss at the investment date.
    pub theta1: f64,
    /// Floor on expected loss retained after liquidation (risk-floor
    /// variant only). Must stay below `theta1`.
    pub theta2: f64,
    /// Cap on the total haircut loss the portfolio could generate if
    /// sold in full (liquidity-cap variant only).
    pub haircut_cap: f64,
    /// Fraction of deposits withdrawn at the intermediate date.
    pub alpha_w: f64,
    /// Fraction of deposits renewed by new depositors at that date.
    pub alpha_d: f64,
    /// Per-unit capital charge of each loan class, in id order.
    pub capital_charges: Vec<f64>,
}

impl BankConfig {
    pub fn validate(&self, n_loans: usize) -> Result<()> {
        if !(self.delta.is_finite() && self.delta >= 1.0) {
            return Err(Error::invalid(
                "delta",
                format!("must be finite and at least 1 (got {})", self.delta),
            ));
        }
        if !(self.k_lev.is_finite() && self.k_lev > 0.0 && self.k_lev <= 1.0) {
            return Err(Error::invalid(
                "k_lev",
                format!("must lie in (0, 1] (got {})", self.k_lev),
            ));
        }
        if !(self.theta1.is_finite() && self.theta1 >= 0.0) {
            return Err(Error::invalid(
                "theta1",
                format!("must be non-negative (got {})", self.theta1),
            ));
        }
        if !(self.theta2.is_finite() && self.theta2 >= 0.0) {
            return Err(Error::invalid(
                "theta2",
                format!("must be non-negative (got {})", self.theta2),
            ));
        }
        if self.theta2 >= self.theta1 {
            return Err(Error::invalid(
                "theta2",
                format!(
                    "must stay below theta1 (got theta2 = {}, theta1 = {})",
                    self.theta2, self.theta1
                ),
            ));
        }
        if !(self.haircut_cap.is_finite() && self.haircut_cap >= 0.0) {
            return Err(Error::invalid(
                "haircut_cap",
                format!("must be non-negative (got {})", self.haircut_cap),
            ));
        }
        if !(self.alpha_w.is_finite() && (0.0..=1.0).contains(&self.alpha_w)) {
            return Err(Error::invalid(
                "alpha_w",
                format!("must lie in [0, 1] (got {})", self.alpha_w),
            ));
        }
        if !(self.alpha_d.is_finite() && self.alpha_d >= 0.0) {
            return Err(Error::invalid(
                "alpha_d",
                format!("must be non-negative (got {})", self.alpha_d),
            ));
        }
        if self.capital_charges.len() != n_loans {
            return Err(Error::DimensionMismatch {
                expected: n_loans,
                actual: self.capital_charges.len(),
            });
        }
        for (i, &k) in self.capital_charges.iter().enumerate() {
            if !(k.is_finite() && (0.0..=1.0).contains(&k)) {
                return Err(Error::invalid(
                    "capital_charges",
                    format!("charge {i} must lie in [0, 1] (got {k})"),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn standard_config_validates() {
        config().validate(3).unwrap();
    }

    #[test]
    fn theta2_must_stay_below_theta1() {
        let mut c = config();
        c.theta2 = 0.012;
        let err = c.validate(3).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "theta2"));
    }

    #[test]
    fn delta_below_one_is_rejected() {
        let mut c = config();
        c.delta = 0.99;
        assert!(c.validate(3).is_err());
    }

    #[test]
    fn charge_vector_length_must_match_universe() {
        let err = config().validate(4).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 4,
                actual: 3
            }
        );
    }

    #[test]
    fn charges_are_range_checked() {
        let mut c = config();
        c.capital_charges[2] = 1.5;
        let err = c.validate(3).unwrap_err();
        assert!(matches!(err, Error::Invalid { ref field, .. } if field == "capital_charges"));
    }

    #[test]
    fn withdrawal_fractions_are_range_checked() {
        let mut c = config();
        c.alpha_w = 1.1;
        assert!(c.validate(3).is_err());
        let mut c = config();
        c.alpha_d = -0.1;
        assert!(c.validate(3).is_err());
    }
}
