//! Command line front end for the loan portfolio toolkit.
//!
//! Every subcommand reads one JSON run configuration (`--config`) and
//! prints a plain-text table, or the same result as JSON with
//! `"output": {"format": "json"}`; `--json FILE` additionally writes
//! the JSON next to whichever format went to stdout. Exit codes: 0 on
//! success, 1 when the requested problem is infeasible, 2 on bad
//! input, 3 on internal solver failures.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use loanliq::analysis::{cap_sweep, floor_sweep, CapSweep, FloorOutcome, FloorSweep};
use loanliq::capital::equity_floor;
use loanliq::{
    build_invest_problem, detect_shortfall, grid_oracle, post_liquidation_state, solve_invest,
    solve_liquidation, BankConfig, InvestSolution, InvestmentDecision, LiquidationProblem,
    LoanUniverse,
};
use loanliq_cli::config::{OutputFormat, RunConfig};
use loanliq_cli::report::{pct, InvestRecord, LiquidationRecord, Report};
use loanliq_cli::{region, CliError};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "loanliq",
    version,
    about = "Loan portfolio optimization and liquidation planning"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Also write the result as pretty JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal portfolio and equity at the initial date.
    Invest {
        /// Drop the haircut budget from the constraint set.
        #[arg(long)]
        no_haircut_cap: bool,
    },
    /// Loss-minimal liquidation at the intermediate date.
    Liquidate {
        /// Drop the risk floor: minimize the haircut loss alone.
        #[arg(long)]
        no_risk_floor: bool,
        /// Override the configured risk floor.
        #[arg(long, value_name = "FLOOR", conflicts_with = "no_risk_floor")]
        theta2: Option<f64>,
        /// Portfolio to liquidate (defaults to the model1 reference).
        #[arg(long, value_delimiter = ',', value_name = "W0,W1,..")]
        weights: Option<Vec<f64>>,
        /// Equity behind that portfolio (defaults to its equity floor).
        #[arg(long)]
        equity: Option<f64>,
    },
    /// Both investment models, each liquidated under every floor and
    /// without one.
    Pipeline,
    /// Re-solve along a falling haircut cap or a rising risk floor.
    Sweep {
        /// Haircut caps to re-solve the investment under, one per row.
        #[arg(long, value_delimiter = ',', value_name = "C0,C1,..")]
        cap_grid: Option<Vec<f64>>,
        /// Risk floors to re-solve the liquidation under, one per row.
        #[arg(long, value_delimiter = ',', value_name = "T0,T1,..")]
        theta2_grid: Option<Vec<f64>>,
        /// Portfolio for the risk floor sweep.
        #[arg(long, value_delimiter = ',', value_name = "W0,W1,..")]
        weights: Option<Vec<f64>>,
    },
    /// Export constraint surfaces as CSV point clouds.
    Region {
        /// Which surfaces: the liquidation problem with the risk floor
        /// (3), without it (4), or the haircut budget planes.
        #[arg(long, value_parser = ["3", "4", "haircut"])]
        model: String,
        /// Grid steps per axis.
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(10..=500))]
        resolution: u32,
        /// Directory the CSV files are written into.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Portfolio whose sales box is mapped (models 3 and 4).
        #[arg(long, value_delimiter = ',', value_name = "W0,W1,..")]
        weights: Option<Vec<f64>>,
        /// Risk floor for the model 3 plane.
        #[arg(long, value_name = "FLOOR")]
        theta2: Option<f64>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::BadInput("--config <FILE> is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let json = cli.json.as_deref();
    match cli.command {
        Command::Invest { no_haircut_cap } => cmd_invest(&cfg, no_haircut_cap, json),
        Command::Liquidate {
            no_risk_floor,
            theta2,
            weights,
            equity,
        } => cmd_liquidate(
            &cfg,
            no_risk_floor,
            theta2,
            weights.as_deref(),
            equity,
            json,
        ),
        Command::Pipeline => cmd_pipeline(&cfg, json),
        Command::Sweep {
            cap_grid,
            theta2_grid,
            weights,
        } => cmd_sweep(&cfg, cap_grid, theta2_grid, weights.as_deref(), json),
        Command::Region {
            model,
            resolution,
            out_dir,
            weights,
            theta2,
        } => cmd_region(
            &cfg,
            &model,
            resolution,
            &out_dir,
            weights.as_deref(),
            theta2,
            json,
        ),
    }
}

fn to_pretty<T: Serialize>(payload: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(payload).map_err(|e| CliError::Internal(e.to_string()))
}

/// Print per the configured format and mirror to `--json` if given.
fn deliver<T: Serialize>(
    payload: &T,
    table: &str,
    format: OutputFormat,
    json_path: Option<&Path>,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Table => print!("{table}"),
        OutputFormat::Json => println!("{}", to_pretty(payload)?),
    }
    if let Some(path) = json_path {
        let mut text = to_pretty(payload)?;
        text.push('\n');
        fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Solve one investment model with the cross-checks the config asks
/// for: the grid oracle gap and, when a custom dedup tolerance is set,
/// a vertex recount under it.
fn solve_model(cfg: &RunConfig, include_cap: bool) -> Result<InvestSolution, CliError> {
    let universe = cfg.universe()?;
    let bank = cfg.bank_config(cfg.bank.theta2[0])?;
    let problem = build_invest_problem(&universe, &bank, include_cap)?;
    let mut solution = solve_invest(&problem)?;
    let oracle = grid_oracle(&problem, cfg.solver.grid_step)?;
    solution.diagnostics.oracle_gap = Some(solution.objective_value - oracle.objective_value);
    if cfg.solver.vertex_dedup_tol != loanliq::VERTEX_DEDUP_TOL {
        let vertices = loanliq::lp::enumerate_vertices_with(
            &problem.linear_program(),
            cfg.solver.vertex_dedup_tol,
        )?;
        solution.diagnostics.vertex_count = vertices.len();
    }
    Ok(solution)
}

fn cmd_invest(cfg: &RunConfig, no_cap: bool, json: Option<&Path>) -> Result<(), CliError> {
    let solution = solve_model(cfg, !no_cap)?;
    let model = if no_cap { "model2" } else { "model1" };
    let report = Report {
        invest: vec![InvestRecord::new(model, &solution, cfg.output.precision)],
        liquidation: vec![],
    };
    deliver(
        &report,
        &report.render_table(&cfg.labels()),
        cfg.output.format,
        json,
    )
}

/// The portfolio to liquidate: explicit weights, else the configured
/// model1 reference, else a fresh capped solve.
fn resolve_portfolio(
    cfg: &RunConfig,
    weights: Option<&[f64]>,
    equity: Option<f64>,
) -> Result<(String, InvestmentDecision), CliError> {
    let (label, weights) = match weights {
        Some(w) => {
            if w.len() != cfg.loans.len() {
                return Err(CliError::BadInput(format!(
                    "--weights expects {} entries, got {}",
                    cfg.loans.len(),
                    w.len()
                )));
            }
            ("custom".to_string(), w.to_vec())
        }
        None => {
            let reference = cfg
                .reference_portfolios
                .as_ref()
                .and_then(|r| r.model1.clone());
            match reference {
                Some(w) => ("model1".to_string(), w),
                None => {
                    let solution = solve_model(cfg, true)?;
                    ("model1".to_string(), solution.decision.weights().to_vec())
                }
            }
        }
    };
    let equity = match equity {
        Some(e) => e,
        None => equity_floor(&weights, &cfg.capital_charges(), cfg.bank.k_lev)?,
    };
    Ok((label, InvestmentDecision::new(weights, equity)?))
}

/// One liquidation solve turned into a record; infeasibility is
/// returned as an error so callers choose between aborting and
/// recording it.
fn liquidate_once(
    decision: &InvestmentDecision,
    universe: &LoanUniverse,
    bank: &BankConfig,
    floor: Option<f64>,
    model: &str,
    input: &str,
    precision: usize,
) -> Result<LiquidationRecord, CliError> {
    let Some(required) = detect_shortfall(bank, decision.equity()) else {
        return Ok(LiquidationRecord::no_shortfall(
            model,
            input,
            floor,
            universe.len(),
        ));
    };
    let problem = LiquidationProblem::new(decision.clone(), universe.clone(), required, floor)?;
    let plan = solve_liquidation(&problem)?;
    let state = post_liquidation_state(decision, &plan, universe, bank)?;
    Ok(LiquidationRecord::solved(
        model, input, floor, &plan, &state, required, precision,
    ))
}

fn cmd_liquidate(
    cfg: &RunConfig,
    no_floor: bool,
    theta2: Option<f64>,
    weights: Option<&[f64]>,
    equity: Option<f64>,
    json: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(t) = theta2 {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::BadInput(format!(
                "--theta2 must be finite and non-negative (got {t})"
            )));
        }
    }
    let universe = cfg.universe()?;
    let bank = cfg.bank_config(cfg.bank.theta2[0])?;
    let (input, decision) = resolve_portfolio(cfg, weights, equity)?;
    let floor = if no_floor {
        None
    } else {
        Some(theta2.unwrap_or(cfg.bank.theta2[0]))
    };
    let model = if floor.is_some() { "model3" } else { "model4" };
    let record = liquidate_once(
        &decision,
        &universe,
        &bank,
        floor,
        model,
        &input,
        cfg.output.precision,
    )?;
    let report = Report {
        invest: vec![],
        liquidation: vec![record],
    };
    deliver(
        &report,
        &report.render_table(&cfg.labels()),
        cfg.output.format,
        json,
    )
}

fn cmd_pipeline(cfg: &RunConfig, json: Option<&Path>) -> Result<(), CliError> {
    let universe = cfg.universe()?;
    let bank = cfg.bank_config(cfg.bank.theta2[0])?;
    let precision = cfg.output.precision;
    let charges = cfg.capital_charges();

    let m1 = solve_model(cfg, true)?;
    let m2 = solve_model(cfg, false)?;
    let mut report = Report {
        invest: vec![
            InvestRecord::new("model1", &m1, precision),
            InvestRecord::new("model2", &m2, precision),
        ],
        liquidation: vec![],
    };

    // liquidate the configured reference portfolios when present, the
    // freshly solved ones otherwise
    let refs = cfg.reference_portfolios.as_ref();
    let mut inputs: Vec<(&str, InvestmentDecision)> = Vec::new();
    for (label, solution, reference) in [
        ("model1", &m1, refs.and_then(|r| r.model1.clone())),
        ("model2", &m2, refs.and_then(|r| r.model2.clone())),
    ] {
        let decision = match reference {
            Some(w) => {
                let e = equity_floor(&w, &charges, cfg.bank.k_lev)?;
                InvestmentDecision::new(w, e)?
            }
            None => solution.decision.clone(),
        };
        inputs.push((label, decision));
    }

    for (label, decision) in &inputs {
        for &t in &cfg.bank.theta2 {
            report.liquidation.push(pipeline_liquidation(
                decision,
                &universe,
                &bank,
                Some(t),
                "model3",
                label,
                precision,
            )?);
        }
        report.liquidation.push(pipeline_liquidation(
            decision, &universe, &bank, None, "model4", label, precision,
        )?);
    }
    deliver(
        &report,
        &report.render_table(&cfg.labels()),
        cfg.output.format,
        json,
    )
}

/// Pipeline variant of [`liquidate_once`]: infeasible stages become
/// records instead of aborting the run.
fn pipeline_liquidation(
    decision: &InvestmentDecision,
    universe: &LoanUniverse,
    bank: &BankConfig,
    floor: Option<f64>,
    model: &str,
    input: &str,
    precision: usize,
) -> Result<LiquidationRecord, CliError> {
    match liquidate_once(decision, universe, bank, floor, model, input, precision) {
        Ok(record) => Ok(record),
        Err(CliError::Infeasible(reason)) => {
            let required = detect_shortfall(bank, decision.equity()).unwrap_or(0.0);
            Ok(LiquidationRecord::infeasible(
                model,
                input,
                floor,
                required,
                &reason,
                universe.len(),
            ))
        }
        Err(other) => Err(other),
    }
}

fn render_cap_sweep(sweep: &CapSweep, precision: usize) -> String {
    let mut out = String::from("haircut cap sweep\n");
    for row in &sweep.rows {
        let weights: Vec<String> = row
            .solution
            .decision
            .weights()
            .iter()
            .map(|w| pct(*w, precision))
            .collect();
        out.push_str(&format!(
            "  cap {:>6}  weights {}%  equity {}%  objective {:.8}  haircut used {:.4}\n",
            format!("{:.4}", row.cap),
            weights.join("/"),
            pct(row.solution.decision.equity(), precision),
            row.solution.objective_value,
            row.haircut_used,
        ));
    }
    let note = if sweep.illiquid_weight_monotone {
        "yes".to_string()
    } else {
        format!("no (rows {:?})", sweep.violations)
    };
    out.push_str(&format!("  illiquid weight monotone falling: {note}\n"));
    out
}

fn render_floor_sweep(sweep: &FloorSweep, precision: usize) -> String {
    let mut out = String::from("risk floor sweep\n");
    for row in &sweep.rows {
        match &row.outcome {
            FloorOutcome::Feasible {
                plan,
                insolvency_probability,
            } => {
                let betas: Vec<String> = plan.betas().iter().map(|b| pct(*b, precision)).collect();
                out.push_str(&format!(
                    "  theta2 {:>9}  sold {}%  loss {:.8}  insolvency {}%\n",
                    format!("{:.6}", row.theta2),
                    betas.join("/"),
                    plan.haircut_loss(),
                    pct(*insolvency_probability, precision),
                ));
            }
            FloorOutcome::Infeasible { reason } => {
                out.push_str(&format!(
                    "  theta2 {:>9}  infeasible: {reason}\n",
                    format!("{:.6}", row.theta2),
                ));
            }
        }
    }
    let note = if sweep.safe_liquidation_monotone {
        "yes".to_string()
    } else {
        format!("no (rows {:?})", sweep.violations)
    };
    out.push_str(&format!("  safe sales monotone falling: {note}\n"));
    out
}

fn cmd_sweep(
    cfg: &RunConfig,
    cap_grid: Option<Vec<f64>>,
    theta2_grid: Option<Vec<f64>>,
    weights: Option<&[f64]>,
    json: Option<&Path>,
) -> Result<(), CliError> {
    let universe = cfg.universe()?;
    let bank = cfg.bank_config(cfg.bank.theta2[0])?;
    match (cap_grid, theta2_grid) {
        (Some(grid), None) => {
            if weights.is_some() {
                return Err(CliError::BadInput(
                    "--weights only applies to --theta2-grid".into(),
                ));
            }
            let sweep = cap_sweep(&universe, &bank, &grid)?;
            deliver(
                &sweep,
                &render_cap_sweep(&sweep, cfg.output.precision),
                cfg.output.format,
                json,
            )
        }
        (None, Some(grid)) => {
            let (_, decision) = resolve_portfolio(cfg, weights, None)?;
            let sweep = floor_sweep(&decision, &universe, &bank, &grid)?;
            deliver(
                &sweep,
                &render_floor_sweep(&sweep, cfg.output.precision),
                cfg.output.format,
                json,
            )
        }
        _ => Err(CliError::BadInput(
            "pass exactly one of --cap-grid or --theta2-grid".into(),
        )),
    }
}

fn cmd_region(
    cfg: &RunConfig,
    model: &str,
    resolution: u32,
    out_dir: &Path,
    weights: Option<&[f64]>,
    theta2: Option<f64>,
    json: Option<&Path>,
) -> Result<(), CliError> {
    let universe = cfg.universe()?;
    if universe.len() != 3 {
        return Err(CliError::BadInput(format!(
            "region export expects exactly 3 loan classes (got {})",
            universe.len()
        )));
    }
    if let Some(t) = theta2 {
        if model != "3" {
            return Err(CliError::BadInput(
                "--theta2 only applies to --model 3".into(),
            ));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::BadInput(format!(
                "--theta2 must be finite and non-negative (got {t})"
            )));
        }
    }
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::BadInput(format!("cannot create {}: {e}", out_dir.display())))?;
    let tol = cfg.solver.feasibility_tol;
    let summary = match model {
        "haircut" => {
            if weights.is_some() {
                return Err(CliError::BadInput(
                    "--weights only applies to --model 3 or 4".into(),
                ));
            }
            region::export_haircut_planes(out_dir, &universe, resolution, tol)?
        }
        m => {
            let bank = cfg.bank_config(cfg.bank.theta2[0])?;
            let (_, decision) = resolve_portfolio(cfg, weights, None)?;
            let required = detect_shortfall(&bank, decision.equity()).ok_or_else(|| {
                CliError::Infeasible(
                    "renewals cover withdrawals; no liquidation stage to map".into(),
                )
            })?;
            let floor = (m == "3").then(|| theta2.unwrap_or(cfg.bank.theta2[0]));
            region::export_liquidation_region(
                out_dir, &universe, &decision, required, floor, resolution, tol,
            )?
        }
    };
    let mut table = String::new();
    for file in &summary.files {
        table.push_str(&format!(
            "wrote {} ({} rows)\n",
            out_dir.join(&file.name).display(),
            file.rows
        ));
    }
    deliver(&summary, &table, cfg.output.format, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_parsing_covers_the_documented_surface() {
        let cli = Cli::try_parse_from([
            "loanliq",
            "--config",
            "c.json",
            "liquidate",
            "--weights",
            "0.1,0.2,0.7",
            "--theta2",
            "0.001",
        ])
        .unwrap();
        match cli.command {
            Command::Liquidate {
                weights, theta2, ..
            } => {
                assert_eq!(weights.unwrap(), vec![0.1, 0.2, 0.7]);
                assert_eq!(theta2.unwrap(), 0.001);
            }
            _ => panic!("wrong subcommand"),
        }

        let err = Cli::try_parse_from([
            "loanliq",
            "--config",
            "c.json",
            "liquidate",
            "--no-risk-floor",
            "--theta2",
            "0.001",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);

        let err = Cli::try_parse_from(["loanliq", "region", "--model", "5", "--out-dir", "d"])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);

        let err = Cli::try_parse_from([
            "loanliq",
            "region",
            "--model",
            "3",
            "--out-dir",
            "d",
            "--resolution",
            "5",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
