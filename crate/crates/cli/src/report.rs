//! Flat result records shared by the table and JSON outputs.
//!
//! Percentages are pre-formatted into the records so that the two
//! output channels can never disagree on a rounded digit.

use loanliq::{InvestSolution, LiquidationPlan, PostLiquidationState};
use serde::Serialize;

/// `x` as a percentage string, rounding ties to even.
pub fn pct(x: f64, precision: usize) -> String {
    let scale = 10f64.powi(precision as i32);
    let rounded = (x * 100.0 * scale).round_ties_even() / scale;
    // normalize -0.00 to 0.00
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:.precision$}")
}

#[derive(Debug, Clone, Serialize)]
pub struct InvestRecord {
    pub model: String,
    pub status: String,
    pub weights: Vec<f64>,
    pub weights_pct: Vec<String>,
    pub equity: f64,
    pub equity_pct: String,
    pub objective: f64,
    pub binding_constraints: Vec<String>,
    pub vertex_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
}

impl InvestRecord {
    pub fn new(model: &str, solution: &InvestSolution, precision: usize) -> Self {
        let weights = solution.decision.weights().to_vec();
        InvestRecord {
            model: model.to_string(),
            status: "optimal".to_string(),
            weights_pct: weights.iter().map(|w| pct(*w, precision)).collect(),
            weights,
            equity: solution.decision.equity(),
            equity_pct: pct(solution.decision.equity(), precision),
            objective: solution.objective_value,
            binding_constraints: solution.binding_constraints.clone(),
            vertex_count: solution.diagnostics.vertex_count,
            oracle_gap: solution.diagnostics.oracle_gap,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LiquidationRecord {
    pub model: String,
    /// Which portfolio was liquidated: "model1", "model2" or "custom".
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    pub status: String,
    pub betas: Vec<f64>,
    pub betas_pct: Vec<String>,
    pub haircut_loss: f64,
    pub cash_raised: f64,
    pub required_cash: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insolvency_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insolvency_pct: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl LiquidationRecord {
    pub fn solved(
        model: &str,
        input: &str,
        theta2: Option<f64>,
        plan: &LiquidationPlan,
        state: &PostLiquidationState,
        required_cash: f64,
        precision: usize,
    ) -> Self {
        LiquidationRecord {
            model: model.to_string(),
            input: input.to_string(),
            theta2,
            status: "optimal".to_string(),
            betas: plan.betas().to_vec(),
            betas_pct: plan.betas().iter().map(|b| pct(*b, precision)).collect(),
            haircut_loss: plan.haircut_loss(),
            cash_raised: plan.cash_raised(),
            required_cash,
            insolvency_probability: Some(state.insolvency_probability),
            insolvency_pct: Some(pct(state.insolvency_probability, precision)),
            reason: None,
        }
    }

    pub fn no_shortfall(model: &str, input: &str, theta2: Option<f64>, n_loans: usize) -> Self {
        LiquidationRecord {
            model: model.to_string(),
            input: input.to_string(),
            theta2,
            status: "no_shortfall".to_string(),
            betas: vec![0.0; n_loans],
            betas_pct: vec![pct(0.0, 2); n_loans],
            haircut_loss: 0.0,
            cash_raised: 0.0,
            required_cash: 0.0,
            insolvency_probability: None,
            insolvency_pct: None,
            reason: None,
        }
    }

    pub fn infeasible(
        model: &str,
        input: &str,
        theta2: Option<f64>,
        required_cash: f64,
        reason: &str,
        n_loans: usize,
    ) -> Self {
        LiquidationRecord {
            model: model.to_string(),
            input: input.to_string(),
            theta2,
            status: "infeasible".to_string(),
            betas: vec![0.0; n_loans],
            betas_pct: vec![pct(0.0, 2); n_loans],
            haircut_loss: 0.0,
            cash_raised: 0.0,
            required_cash,
            insolvency_probability: None,
            insolvency_pct: None,
            reason: Some(reason.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub invest: Vec<InvestRecord>,
    pub liquidation: Vec<LiquidationRecord>,
}

impl Report {
    pub fn render_table(&self, labels: &[String]) -> String {
        let mut out = String::new();
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(6).max(6);
        for record in &self.invest {
            out.push_str(&format!("investment {}: {}\n", record.model, record.status));
            for (label, w) in labels.iter().zip(&record.weights_pct) {
                out.push_str(&format!("  {label:<width$}  {w:>10}%\n"));
            }
            out.push_str(&format!(
                "  {:<width$}  {:>10}%\n",
                "equity", record.equity_pct
            ));
            out.push_str(&format!("  objective  {:.8}\n", record.objective));
            out.push_str(&format!(
                "  binding    {}\n",
                record.binding_constraints.join(", ")
            ));
            match record.oracle_gap {
                Some(gap) => out.push_str(&format!(
                    "  vertices   {}  grid oracle gap {gap:+.2e}\n",
                    record.vertex_count
                )),
                None => out.push_str(&format!("  vertices   {}\n", record.vertex_count)),
            }
            out.push('\n');
        }
        for record in &self.liquidation {
            let floor = match record.theta2 {
                Some(t) => format!(", risk floor {t}"),
                None => String::new(),
            };
            out.push_str(&format!(
                "liquidation {} on {} portfolio{}: {}\n",
                record.model, record.input, floor, record.status
            ));
            match record.status.as_str() {
                "no_shortfall" => {
                    out.push_str("  renewals cover withdrawals; nothing to sell\n\n");
                    continue;
                }
                "infeasible" => {
                    let reason = record.reason.as_deref().unwrap_or("infeasible");
                    out.push_str(&format!("  {reason}\n\n"));
                    continue;
                }
                _ => {}
            }
            for (label, b) in labels.iter().zip(&record.betas_pct) {
                out.push_str(&format!("  sold {label:<width$}  {b:>10}%\n"));
            }
            out.push_str(&format!("  haircut loss  {:.8}\n", record.haircut_loss));
            out.push_str(&format!(
                "  cash raised   {:.8} (required {:.8})\n",
                record.cash_raised, record.required_cash
            ));
            if let Some(p) = &record.insolvency_pct {
                out.push_str(&format!("  insolvency probability  {p}%\n"));
            }
            out.push('\n');
        }
        out
    }
}
