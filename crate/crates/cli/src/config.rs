//! JSON run configuration: loan universe, bank parameters, solver
//! tuning and output preferences in one file.

use std::fs;
use std::path::Path;

use loanliq::{BankConfig, LoanClass, LoanUniverse};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One loan class as configured, with its capital charge attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoanEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rate: f64,
    pub pd: f64,
    pub lgd: f64,
    pub haircut: f64,
    #[serde(default)]
    pub capital_charge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankSection {
    pub delta: f64,
    pub k_lev: f64,
    pub theta1: f64,
    /// Risk floors to evaluate, in increasing order; commands default
    /// to the first.
    pub theta2: Vec<f64>,
    pub haircut_cap: f64,
    pub alpha_w: f64,
    pub alpha_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Step of the brute-force grid used to cross-check investments.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Tolerance for the point-membership checks on user inputs and
    /// exported region samples.
    #[serde(default = "default_feasibility_tol")]
    pub feasibility_tol: f64,
    /// Distance under which two enumerated vertices count as one, for
    /// the vertex diagnostics.
    #[serde(default = "default_vertex_dedup_tol")]
    pub vertex_dedup_tol: f64,
}

fn default_grid_step() -> f64 {
    0.005
}

fn default_feasibility_tol() -> f64 {
    loanliq::FEASIBILITY_TOL
}

fn default_vertex_dedup_tol() -> f64 {
    loanliq::VERTEX_DEDUP_TOL
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            grid_step: default_grid_step(),
            feasibility_tol: default_feasibility_tol(),
            vertex_dedup_tol: default_vertex_dedup_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Decimal places for percentages.
    #[serde(default = "default_precision")]
    pub precision: usize,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_precision() -> usize {
    2
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            precision: default_precision(),
            format: OutputFormat::Table,
        }
    }
}

/// Known-good portfolios to run the liquidation stage against, keyed by
/// the investment model that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePortfolios {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model2: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub loans: Vec<LoanEntry>,
    pub bank: BankSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_portfolios: Option<ReferencePortfolios>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Field-by-field validation with config paths in the messages;
    /// cross-field rules are re-checked by the library at use.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, msg: String| Err(CliError::BadInput(format!("{path}: {msg}")));
        if self.loans.is_empty() {
            return bad("loans", "at least one loan class required".into());
        }
        for (i, loan) in self.loans.iter().enumerate() {
            if !loan.rate.is_finite() || loan.rate <= -1.0 {
                return bad(
                    &format!("loans[{i}].rate"),
                    format!("must be finite and above -1 (got {})", loan.rate),
                );
            }
            if !loan.pd.is_finite() || !(0.0..=1.0).contains(&loan.pd) {
                return bad(
                    &format!("loans[{i}].pd"),
                    format!("pd must lie in [0, 1] (got {})", loan.pd),
                );
            }
            if !loan.lgd.is_finite() || !(0.0..=1.0).contains(&loan.lgd) {
                return bad(
                    &format!("loans[{i}].lgd"),
                    format!("must lie in [0, 1] (got {})", loan.lgd),
                );
            }
            if !loan.haircut.is_finite() || !(0.0..1.0).contains(&loan.haircut) {
                return bad(
                    &format!("loans[{i}].haircut"),
                    format!("must lie in [0, 1) (got {})", loan.haircut),
                );
            }
            if !loan.capital_charge.is_finite() || !(0.0..=1.0).contains(&loan.capital_charge) {
                return bad(
                    &format!("loans[{i}].capital_charge"),
                    format!("must lie in [0, 1] (got {})", loan.capital_charge),
                );
            }
        }
        if self.bank.theta2.is_empty() {
            return bad("bank.theta2", "at least one risk floor required".into());
        }
        for (i, &t) in self.bank.theta2.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return bad(
                    &format!("bank.theta2[{i}]"),
                    format!("must be finite and non-negative (got {t})"),
                );
            }
            if t >= self.bank.theta1 {
                return bad(
                    &format!("bank.theta2[{i}]"),
                    format!("must stay below theta1 = {} (got {t})", self.bank.theta1),
                );
            }
        }
        for pair in self.bank.theta2.windows(2) {
            if pair[1] <= pair[0] {
                return bad(
                    "bank.theta2",
                    format!(
                        "floors must increase strictly (got {} then {})",
                        pair[0], pair[1]
                    ),
                );
            }
        }
        if !(self.solver.grid_step.is_finite()
            && self.solver.grid_step > 0.0
            && self.solver.grid_step <= 0.1)
        {
            return bad(
                "solver.grid_step",
                format!("must lie in (0, 0.1] (got {})", self.solver.grid_step),
            );
        }
        if !(self.solver.feasibility_tol.is_finite() && self.solver.feasibility_tol > 0.0) {
            return bad(
                "solver.feasibility_tol",
                format!("must be positive (got {})", self.solver.feasibility_tol),
            );
        }
        if !(self.solver.vertex_dedup_tol.is_finite() && self.solver.vertex_dedup_tol > 0.0) {
            return bad(
                "solver.vertex_dedup_tol",
                format!("must be positive (got {})", self.solver.vertex_dedup_tol),
            );
        }
        if self.output.precision > 8 {
            return bad(
                "output.precision",
                format!(
                    "at most 8 decimal places supported (got {})",
                    self.output.precision
                ),
            );
        }

        // cross-field rules: build the library types once so ordering
        // and range violations surface at load time
        let universe = self.universe()?;
        self.bank_config(self.bank.theta2[0])?
            .validate(universe.len())?;
        if let Some(refs) = &self.reference_portfolios {
            for (name, weights) in [("model1", &refs.model1), ("model2", &refs.model2)] {
                let Some(weights) = weights else { continue };
                let path = format!("reference_portfolios.{name}");
                if weights.len() != universe.len() {
                    return bad(
                        &path,
                        format!("expected {} weights, got {}", universe.len(), weights.len()),
                    );
                }
                if weights
                    .iter()
                    .any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0)
                {
                    return bad(&path, "weights must lie in [0, 1]".into());
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > 1e-6 {
                    return bad(&path, format!("weights must sum to 1 (got {sum})"));
                }
            }
        }
        Ok(())
    }

    /// Loan entries sorted by id.
    fn sorted_loans(&self) -> Vec<&LoanEntry> {
        let mut loans: Vec<&LoanEntry> = self.loans.iter().collect();
        loans.sort_by_key(|l| l.id);
        loans
    }

    pub fn universe(&self) -> Result<LoanUniverse, CliError> {
        let loans = self
            .loans
            .iter()
            .map(|l| LoanClass {
                id: l.id,
                rate: l.rate,
                pd: l.pd,
                lgd: l.lgd,
                haircut: l.haircut,
            })
            .collect();
        Ok(LoanUniverse::new(loans)?)
    }

    /// Capital charges in id order, matching the universe.
    pub fn capital_charges(&self) -> Vec<f64> {
        self.sorted_loans()
            .iter()
            .map(|l| l.capital_charge)
            .collect()
    }

    /// Loan display labels in id order.
    pub fn labels(&self) -> Vec<String> {
        self.sorted_loans()
            .iter()
            .map(|l| l.name.clone().unwrap_or_else(|| format!("loan {}", l.id)))
            .collect()
    }

    /// Bank parameters with one concrete risk floor picked.
    pub fn bank_config(&self, theta2: f64) -> Result<BankConfig, CliError> {
        let config = BankConfig {
            delta: self.bank.delta,
            k_lev: self.bank.k_lev,
            theta1: self.bank.theta1,
            theta2,
            haircut_cap: self.bank.haircut_cap,
            alpha_w: self.bank.alpha_w,
            alpha_d: self.bank.alpha_d,
            capital_charges: self.capital_charges(),
        };
        config.validate(self.loans.len())?;
        Ok(config)
    }

    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    /// The built-in worked example: a safe class plus two risky classes
    /// with charges calibrated so the haircut cap visibly reshapes the
    /// optimal portfolio, and the reference portfolios the liquidation
    /// stage is usually discussed against.
    pub fn worked_example() -> Self {
        RunConfig {
            loans: vec![
                LoanEntry {
                    id: 0,
                    name: Some("Safe".into()),
                    rate: 0.03,
                    pd: 0.0,
                    lgd: 0.0,
                    haircut: 0.0,
                    capital_charge: 0.0,
                },
                LoanEntry {
                    id: 1,
                    name: Some("Less risky".into()),
                    rate: 0.09,
                    pd: 0.061,
                    lgd: 0.10,
                    haircut: 0.10,
                    capital_charge: 0.025,
                },
                LoanEntry {
                    id: 2,
                    name: Some("More risky".into()),
                    rate: 0.132,
                    pd: 0.122,
                    lgd: 0.09,
                    haircut: 0.20,
                    capital_charge: 0.03,
                },
            ],
            bank: BankSection {
                delta: 1.04,
                k_lev: 0.04,
                theta1: 0.012,
                theta2: vec![0.0005, 0.001],
                haircut_cap: 0.15,
                alpha_w: 0.10,
                alpha_d: 0.0,
            },
            solver: SolverSection::default(),
            output: OutputSection::default(),
            reference_portfolios: Some(ReferencePortfolios {
                model1: Some(vec![0.0291, 0.4418, 0.5291]),
                model2: Some(vec![0.0, 0.2778, 0.7222]),
            }),
        }
    }
}
