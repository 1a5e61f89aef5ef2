//! Default scenarios at maturity and the bank's limited-liability payoff.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loan::LoanUniverse;
use crate::portfolio::InvestmentDecision;

/// Largest number of risky classes we enumerate scenarios for; beyond
/// this the 2^n joint-default tree is no longer practical.
const MAX_RISKY: usize = 20;

/// One joint default outcome at maturity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// Bitmask over the risky classes; the first risky class is the most
    /// significant bit, so masks enumerate in the order none, last-only,
    /// ..., all.
    pub default_mask: usize,
    /// Probability of this outcome under independent defaults.
    pub probability: f64,
    /// Value at maturity of one unit invested in each class.
    pub unit_payoffs: Vec<f64>,
}

impl Scenario {
    pub fn defaults(&self, loan_id: usize, n_loans: usize) -> bool {
        if loan_id == 0 {
            return false;
        }
        let n_risky = n_loans - 1;
        let bit = n_risky - loan_id; // first risky class sits at the MSB
        self.default_mask >> bit & 1 == 1
    }
}

/// All joint default outcomes for a universe, with probabilities summing
/// to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSet {
    scenarios: Vec<Scenario>,
    n_loans: usize,
}

impl ScenarioSet {
    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_loans(&self) -> usize {
        self.n_loans
    }

    /// The scenario in which every risky class defaults.
    pub fn all_defaults(&self) -> &Scenario {
        self.scenarios.last().expect("sets are never empty")
    }
}

/// Enumerate the 2^(n-1) joint default outcomes of the risky classes,
/// assuming independence. The safe class never defaults.
pub fn enumerate_scenarios(universe: &LoanUniverse) -> Result<ScenarioSet> {
    let n_risky = universe.len() - 1;
    if n_risky > MAX_RISKY {
        return Err(Error::invalid(
            "loans",
            format!("at most {MAX_RISKY} risky classes supported (got {n_risky})"),
        ));
    }
    let mut scenarios = Vec::with_capacity(1 << n_risky);
    for mask in 0..1usize << n_risky {
        let mut probability = 1.0;
        let mut unit_payoffs = Vec::with_capacity(universe.len());
        for loan in universe.loans() {
            let defaulted = if loan.is_safe() {
                false
            } else {
                let bit = n_risky - loan.id;
                mask >> bit & 1 == 1
            };
            probability *= if defaulted { loan.pd } else { 1.0 - loan.pd };
            unit_payoffs.push(loan.final_value(1.0, defaulted)?);
        }
        scenarios.push(Scenario {
            default_mask: mask,
            probability,
            unit_payoffs,
        });
    }
    let total: f64 = scenarios.iter().map(|s| s.probability).sum();
    debug_assert!((total - 1.0).abs() < 1e-12, "probabilities sum to {total}");
    Ok(ScenarioSet {
        scenarios,
        n_loans: universe.len(),
    })
}

/// Value at maturity of the portfolio in one scenario, per unit of
/// balance sheet.
pub fn portfolio_realization(decision: &InvestmentDecision, scenario: &Scenario) -> Result<f64> {
    if decision.weights().len() != scenario.unit_payoffs.len() {
        return Err(Error::DimensionMismatch {
            expected: scenario.unit_payoffs.len(),
            actual: decision.weights().len(),
        });
    }
    Ok(decision
        .weights()
        .iter()
        .zip(&scenario.unit_payoffs)
        .map(|(w, v)| w * v)
        .sum())
}

/// Expected shareholder value under limited liability: equity holders
/// receive `max(X - (1 - e), 0)` in each scenario and pay the
/// opportunity cost `delta * e` up front.
pub fn limited_liability_payoff(
    decision: &InvestmentDecision,
    scenarios: &ScenarioSet,
    delta: f64,
) -> Result<f64> {
    let liability = 1.0 - decision.equity();
    let mut expected = 0.0;
    for s in scenarios.scenarios() {
        let x = portfolio_realization(decision, s)?;
        expected += s.probability * (x - liability).max(0.0);
    }
    Ok(expected - delta * decision.equity())
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
    fn four_scenarios_with_known_probabilities() {
        let set = enumerate_scenarios(&universe()).unwrap();
        assert_eq!(set.len(), 4);
        let probs: Vec<f64> = set.scenarios().iter().map(|s| s.probability).collect();
        let expected = [0.824442, 0.114558, 0.053558, 0.007442];
        for (p, e) in probs.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12, "got {p}, want {e}");
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mask_bit_order_puts_first_risky_class_at_the_msb() {
        let set = enumerate_scenarios(&universe()).unwrap();
        let n = set.n_loans();
        // mask 1: only the last class defaults
        let s = &set.scenarios()[1];
        assert!(!s.defaults(1, n));
        assert!(s.defaults(2, n));
        assert!((s.probability - 0.939 * 0.122).abs() < 1e-15);
        // mask 2: only the first risky class defaults
        let s = &set.scenarios()[2];
        assert!(s.defaults(1, n));
        assert!(!s.defaults(2, n));
        // the safe class never defaults
        assert!(!set.all_defaults().defaults(0, n));
        assert_eq!(set.all_defaults().default_mask, 3);
    }

    #[test]
    fn unit_payoffs_follow_default_status() {
        let set = enumerate_scenarios(&universe()).unwrap();
        let none = &set.scenarios()[0];
        for (got, want) in none.unit_payoffs.iter().zip([1.03, 1.09, 1.132]) {
            assert!((got - want).abs() < 1e-12);
        }
        let both = set.all_defaults();
        assert!((both.unit_payoffs[1] - 0.90).abs() < 1e-12);
        assert!((both.unit_payoffs[2] - 0.91).abs() < 1e-12);
        assert!((both.unit_payoffs[0] - 1.03).abs() < 1e-12);
    }

    #[test]
    fn realization_is_the_weighted_payoff() {
        let set = enumerate_scenarios(&universe()).unwrap();
        let d = InvestmentDecision::new(vec![0.2, 0.3, 0.5], 0.04).unwrap();
        let x = portfolio_realization(&d, &set.scenarios()[0]).unwrap();
        assert!((x - (0.2 * 1.03 + 0.3 * 1.09 + 0.5 * 1.132)).abs() < 1e-12);
    }

    #[test]
    fn limited_liability_truncates_losses() {
        let set = enumerate_scenarios(&universe()).unwrap();
        // all-in on the safe loan: payoff is deterministic
        let d = InvestmentDecision::new(vec![1.0, 0.0, 0.0], 0.04).unwrap();
        let v = limited_liability_payoff(&d, &set, 1.04).unwrap();
        assert!((v - ((1.03 - 0.96) - 1.04 * 0.04)).abs() < 1e-12);
        // a portfolio that defaults below the liability in the
        // all-defaults scenario pays zero there, not a negative amount
        let d = InvestmentDecision::new(vec![0.0, 0.0, 1.0], 0.04).unwrap();
        let v = limited_liability_payoff(&d, &set, 1.04).unwrap();
        let by_hand = 0.824442 * (1.132f64 - 0.96)
            + 0.114558 * 0.0
            + 0.053558 * (1.132f64 - 0.96)
            + 0.007442 * 0.0
            - 1.04 * 0.04;
        assert!((v - by_hand).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let set = enumerate_scenarios(&universe()).unwrap();
        let d = InvestmentDecision::new(vec![0.5, 0.5], 0.04).unwrap();
        assert!(portfolio_realization(&d, &set.scenarios()[0]).is_err());
    }
}
