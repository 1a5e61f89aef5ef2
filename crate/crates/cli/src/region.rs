//! CSV exports of the constraint surfaces, for plotting.
//!
//! Each file is a point cloud sampled on one surface: the box of
//! admissible sales, the cash-requirement plane, the risk-floor plane,
//! or a haircut budget plane in portfolio space. Planes are sampled by
//! gridding two coordinates and solving the plane equation for the
//! axis with the largest coefficient, which keeps the solved
//! coordinate well conditioned.

use std::fs;
use std::path::Path;

use loanliq::capital::expected_loss;
use loanliq::{InvestmentDecision, LoanUniverse};
use serde::Serialize;

use crate::CliError;

/// Haircut budget levels exported by `region --model haircut`.
const HAIRCUT_PLANE_LOW: f64 = 0.10;
const HAIRCUT_PLANE_HIGH: f64 = 0.15;

#[derive(Debug, Clone, Serialize)]
pub struct RegionFile {
    pub name: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionSummary {
    pub files: Vec<RegionFile>,
}

/// Sample the plane `coeffs . p = rhs` over the box, gridding the two
/// free coordinates and solving for the largest-coefficient axis.
fn sample_plane(
    coeffs: [f64; 3],
    rhs: f64,
    bounds: [(f64, f64); 3],
    resolution: u32,
    tol: f64,
) -> Result<Vec<[f64; 3]>, CliError> {
    let axis = (0..3)
        .max_by(|a, b| coeffs[*a].abs().total_cmp(&coeffs[*b].abs()))
        .expect("three axes");
    if coeffs[axis].abs() < 1e-12 {
        return Err(CliError::BadInput(
            "plane has no nonzero coefficient to solve for".into(),
        ));
    }
    let free: Vec<usize> = (0..3).filter(|a| *a != axis).collect();
    let steps = resolution as usize;
    let mut points = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let mut p = [0.0; 3];
            for (f, t) in free.iter().zip([i, j]) {
                let (lo, hi) = bounds[*f];
                p[*f] = lo + (hi - lo) * t as f64 / steps as f64;
            }
            let partial: f64 = free.iter().map(|f| coeffs[*f] * p[*f]).sum();
            let solved = (rhs - partial) / coeffs[axis];
            let (lo, hi) = bounds[axis];
            if solved < lo - tol || solved > hi + tol {
                continue;
            }
            p[axis] = solved.clamp(lo, hi);
            points.push(p);
        }
    }
    Ok(points)
}

/// Sample all six faces of the box.
fn sample_box(bounds: [(f64, f64); 3], resolution: u32) -> Vec<[f64; 3]> {
    let steps = resolution as usize;
    let mut points = Vec::new();
    for axis in 0..3 {
        let free: Vec<usize> = (0..3).filter(|a| *a != axis).collect();
        for side in [bounds[axis].0, bounds[axis].1] {
            for i in 0..=steps {
                for j in 0..=steps {
                    let mut p = [0.0; 3];
                    p[axis] = side;
                    for (f, t) in free.iter().zip([i, j]) {
                        let (lo, hi) = bounds[*f];
                        p[*f] = lo + (hi - lo) * t as f64 / steps as f64;
                    }
                    points.push(p);
                }
            }
            // a collapsed axis makes both faces identical
            if bounds[axis].0 == bounds[axis].1 {
                break;
            }
        }
    }
    points
}

fn write_points(dir: &Path, name: &str, points: &[[f64; 3]]) -> Result<RegionFile, CliError> {
    let mut text = String::with_capacity(points.len() * 36 + 16);
    text.push_str("L0,L1,L2\n");
    for p in points {
        text.push_str(&format!("{:.8},{:.8},{:.8}\n", p[0], p[1], p[2]));
    }
    let path = dir.join(name);
    fs::write(&path, text)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(RegionFile {
        name: name.to_string(),
        rows: points.len(),
    })
}

/// Export the liquidation-stage surfaces for the given portfolio:
/// the sales box and the cash plane, plus the risk-floor plane when
/// `theta2` is set.
pub fn export_liquidation_region(
    out_dir: &Path,
    universe: &LoanUniverse,
    decision: &InvestmentDecision,
    required_cash: f64,
    theta2: Option<f64>,
    resolution: u32,
    tol: f64,
) -> Result<RegionSummary, CliError> {
    let weights = decision.weights();
    let bounds = [(0.0, weights[0]), (0.0, weights[1]), (0.0, weights[2])];
    let cash: Vec<f64> = universe
        .loans()
        .iter()
        .map(|l| (1.0 - l.haircut) * l.present_value(1.0))
        .collect();
    let cash = [cash[0], cash[1], cash[2]];
    let prefix = if theta2.is_some() { "model3" } else { "model4" };

    let mut files = Vec::new();
    files.push(write_points(
        out_dir,
        &format!("{prefix}_box.csv"),
        &sample_box(bounds, resolution),
    )?);
    files.push(write_points(
        out_dir,
        &format!("{prefix}_cash.csv"),
        &sample_plane(cash, required_cash, bounds, resolution, tol)?,
    )?);
    if let Some(floor) = theta2 {
        let risk: Vec<f64> = universe.loans().iter().map(expected_loss).collect();
        let risk = [risk[0], risk[1], risk[2]];
        files.push(write_points(
            out_dir,
            "model3_risk_floor.csv",
            &sample_plane(risk, floor, bounds, resolution, tol)?,
        )?);
    }
    Ok(RegionSummary { files })
}

/// Export the two haircut budget planes over the portfolio cube.
pub fn export_haircut_planes(
    out_dir: &Path,
    universe: &LoanUniverse,
    resolution: u32,
    tol: f64,
) -> Result<RegionSummary, CliError> {
    let haircuts = universe.haircuts();
    let coeffs = [haircuts[0], haircuts[1], haircuts[2]];
    let bounds = [(0.0, 1.0); 3];
    let mut files = Vec::new();
    for (name, level) in [
        ("haircut_cap_10.csv", HAIRCUT_PLANE_LOW),
        ("haircut_cap_15.csv", HAIRCUT_PLANE_HIGH),
    ] {
        files.push(write_points(
            out_dir,
            name,
            &sample_plane(coeffs, level, bounds, resolution, tol)?,
        )?);
    }
    Ok(RegionSummary { files })
}
