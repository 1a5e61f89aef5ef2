//! Loan classes and the validated loan universe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One class of loans on the bank's balance sheet.
///
/// Class 0 is the safe class: it cannot default and sells without a
/// haircut. Risky classes carry a default probability `pd`, a loss given
/// default `lgd`, and a liquidation haircut that grows with riskiness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoanClass {
    /// Index of the class; 0 is the safe loan.
    pub id: usize,
    /// Interest rate over the full horizon.
    pub rate: f64,
    /// Probability of default over the full horizon.
    pub pd: f64,
    /// Loss given default, as a fraction of principal.
    pub lgd: f64,
    /// Fraction of value lost when the loan is sold before maturity.
    pub haircut: f64,
}

impl LoanClass {
    pub fn is_safe(&self) -> bool {
        self.id == 0
    }

    /// Marked-to-market value at the intermediate date: half the interest
    /// has accrued.
    pub fn present_value(&self, principal: f64) -> f64 {
        debug_assert!(principal >= 0.0);
        (1.0 + self.rate / 2.0) * principal
    }

    /// Value at maturity: principal plus full interest if repaid,
    /// `(1 - lgd) * principal` if defaulted (no interest accrues on a
    /// defaulted loan). The safe loan rejects `defaulted = true`.
    pub fn final_value(&self, principal: f64, defaulted: bool) -> Result<f64> {
        debug_assert!(principal >= 0.0);
        if defaulted {
            if self.is_safe() {
                return Err(Error::SafeLoanDefault);
            }
            Ok((1.0 - self.lgd) * principal)
        } else {
            Ok((1.0 + self.rate) * principal)
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be finite (got {v})")))
            }
        };
        finite("rate", self.rate)?;
        finite("pd", self.pd)?;
        finite("lgd", self.lgd)?;
        finite("haircut", self.haircut)?;
        if self.rate <= -1.0 {
            return Err(Error::invalid(
                "rate",
                format!("must exceed -1 (got {})", self.rate),
            ));
        }
        if !(0.0..=1.0).contains(&self.pd) {
            return Err(Error::invalid(
                "pd",
                format!("must lie in [0, 1] (got {})", self.pd),
            ));
        }
        if !(0.0..=1.0).contains(&self.lgd) {
            return Err(Error::invalid(
                "lgd",
                format!("must lie in [0, 1] (got {})", self.lgd),
            ));
        }
        if !(0.0..1.0).contains(&self.haircut) {
            return Err(Error::invalid(
                "haircut",
                format!("must lie in [0, 1) (got {})", self.haircut),
            ));
        }
        if self.is_safe() && (self.pd != 0.0 || self.lgd != 0.0 || self.haircut != 0.0) {
            return Err(Error::invalid(
                "loan 0",
                "the safe loan must have pd = 0, lgd = 0 and haircut = 0",
            ));
        }
        Ok(())
    }
}

/// A validated set of loan classes, sorted by id.
///
/// Invariants: ids are exactly `0..n` (so there is one safe loan and no
/// duplicates), and both rates and haircuts increase strictly with the
/// id, making the last class the highest-yielding and least liquid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoanUniverse {
    loans: Vec<LoanClass>,
}

impl LoanUniverse {
    pub fn new(mut loans: Vec<LoanClass>) -> Result<Self> {
        if loans.is_empty() {
            return Err(Error::invalid("loans", "at least one loan class required"));
        }
        loans.sort_by_key(|l| l.id);
        for (pos, loan) in loans.iter().enumerate() {
            if loan.id != pos {
                return Err(Error::invalid(
                    "id",
                    format!(
                        "loan ids must be 0..{} without duplicates or gaps (found {})",
                        loans.len(),
                        loan.id
                    ),
                ));
            }
            loan.validate()?;
        }
        for pair in loans.windows(2) {
            if pair[1].rate <= pair[0].rate {
                return Err(Error::invalid(
                    "rate",
                    format!(
                        "rates must increase strictly with the id \
                         (loan {} has {}, loan {} has {})",
                        pair[0].id, pair[0].rate, pair[1].id, pair[1].rate
                    ),
                ));
            }
            if pair[1].haircut <= pair[0].haircut {
                return Err(Error::invalid(
                    "haircut",
                    format!(
                        "haircuts must increase strictly with the id \
                         (loan {} has {}, loan {} has {})",
                        pair[0].id, pair[0].haircut, pair[1].id, pair[1].haircut
                    ),
                ));
            }
        }
        Ok(Self { loans })
    }

    pub fn len(&self) -> usize {
        self.loans.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn loans(&self) -> &[LoanClass] {
        &self.loans
    }

    pub fn get(&self, id: usize) -> Option<&LoanClass> {
        self.loans.get(id)
    }

    /// The risky classes, in id order.
    pub fn risky(&self) -> &[LoanClass] {
        &self.loans[1..]
    }

    pub fn haircuts(&self) -> Vec<f64> {
        self.loans.iter().map(|l| l.haircut).collect()
    }
}
