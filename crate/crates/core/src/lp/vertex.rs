//! Vertex enumeration for small polytopes.
//!
//! Every vertex of a bounded polyhedron is the solution of n linearly
//! independent active constraints, so we solve all n-subsets that
//! include the equality rows and keep the feasible, distinct solutions.
//! Exponential in n, which is fine for the handful of variables used
//! here, and entirely separate from the simplex path so the two can
//! cross-check each other.

use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::{FEASIBILITY_TOL, VERTEX_DEDUP_TOL};

/// Hard cap on the number of variables; beyond this the subset count
/// explodes and the simplex route is the only sensible one.
const MAX_VARS: usize = 12;
/// Hard cap on candidate subsets actually enumerated.
const MAX_SUBSETS: u128 = 2_000_000;
/// Pivots smaller than this mean a degenerate subset, not a vertex.
const SINGULAR_TOL: f64 = 1e-10;

/// Enumerate the vertices of the feasible region, deduplicated and
/// sorted lexicographically. An empty result means the region has no
/// vertex (for bounded feasible regions: the region is empty).
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<Vec<f64>>> {
    enumerate_vertices_with(lp, VERTEX_DEDUP_TOL)
}

/// Same as [`enumerate_vertices`] with an explicit dedup tolerance
/// (largest coordinate gap under which two points count as one vertex).
pub fn enumerate_vertices_with(lp: &LinearProgram, dedup_tol: f64) -> Result<Vec<Vec<f64>>> {
    lp.validate()?;
    if !(dedup_tol.is_finite() && dedup_tol > 0.0) {
        return Err(Error::invalid(
            "dedup_tol",
            format!("must be positive and finite (got {dedup_tol})"),
        ));
    }
    let n = lp.n_vars();
    if n > MAX_VARS {
        return Err(Error::invalid(
            "objective",
            format!("vertex enumeration supports at most {MAX_VARS} variables (got {n})"),
        ));
    }
    let n_eq = lp.equalities.len();
    if n_eq > n {
        return Err(Error::invalid(
            "equalities",
            format!("more equality rows ({n_eq}) than variables ({n})"),
        ));
    }

    // Candidate active rows beyond the always-active equalities.
    let mut candidates: Vec<(Vec<f64>, f64)> = Vec::new();
    for ineq in &lp.inequalities {
        candidates.push((ineq.coeffs.clone(), ineq.rhs));
    }
    for (j, &(lo, up)) in lp.bounds.iter().enumerate() {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        if lo.is_finite() {
            candidates.push((unit.clone(), lo));
        }
        if up.is_finite() {
            candidates.push((unit, up));
        }
    }

    let k = n - n_eq;
    if binomial(candidates.len(), k) > MAX_SUBSETS {
        return Err(Error::invalid(
            "inequalities",
            format!(
                "too many constraint subsets to enumerate ({} choose {k})",
                candidates.len()
            ),
        ));
    }
    if candidates.len() < k {
        return Ok(Vec::new());
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let push_if_vertex = |subset: &[usize], vertices: &mut Vec<Vec<f64>>| {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for eq in &lp.equalities {
            a.push(eq.coeffs.clone());
            b.push(eq.rhs);
        }
        for &c in subset {
            a.push(candidates[c].0.clone());
            b.push(candidates[c].1);
        }
        let Some(point) = solve_square(&mut a, &mut b) else {
            return;
        };
        if lp.max_violation(&point) > FEASIBILITY_TOL {
            return;
        }
        let duplicate = vertices.iter().any(|v| {
            v.iter()
                .zip(&point)
                .all(|(a, b)| (a - b).abs() <= dedup_tol)
        });
        if !duplicate {
            vertices.push(point);
        }
    };

    // Iterate k-subsets of candidate indices in lexicographic order.
    if k == 0 {
        push_if_vertex(&[], &mut vertices);
    } else {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            push_if_vertex(&subset, &mut vertices);
            // advance to the next combination
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if subset[i] != i + candidates.len() - k {
                    subset[i] += 1;
                    for j in i + 1..k {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    subset.clear();
                    break;
                }
            }
            if subset.is_empty() {
                break;
            }
        }
    }

    vertices.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).expect("vertices are finite"))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(vertices)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if result > MAX_SUBSETS {
            return result;
        }
    }
    result
}

/// Solve the square system in place by Gaussian elimination with
/// partial pivoting; `None` when the matrix is singular.
// the elimination loop reads the pivot row while writing another, so
// an iterator rewrite would need split_at_mut contortions for nothing
#[allow(clippy::needless_range_loop)]
fn solve_square(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < SINGULAR_TOL {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for j in col..n {
                    a[row][j] -= factor * a[col][j];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut v = b[row];
        for j in row + 1..n {
            v -= a[row][j] * x[j];
        }
        x[row] = v / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, Direction, Equality, Inequality, LpStatus, Sense};

    fn sorted_contains(vertices: &[Vec<f64>], target: &[f64]) -> bool {
        vertices
            .iter()
            .any(|v| v.iter().zip(target).all(|(a, b)| (a - b).abs() < 1e-9))
    }

    #[test]
    fn unit_square_has_four_corners() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![1.0, 1.0],
            equalities: vec![],
            inequalities: vec![],
            bounds: vec![(0.0, 1.0); 2],
        };
        let vs = enumerate_vertices(&lp).unwrap();
        assert_eq!(vs.len(), 4);
        assert_eq!(vs[0], vec![0.0, 0.0]); // lexicographic order
        assert_eq!(vs[3], vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_cut_adds_two_corners() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![1.0, 1.0],
            equalities: vec![],
            inequalities: vec![Inequality {
                coeffs: vec![1.0, 1.0],
                rhs: 1.5,
                direction: Direction::Le,
            }],
            bounds: vec![(0.0, 1.0); 2],
        };
        let vs = enumerate_vertices(&lp).unwrap();
        assert_eq!(vs.len(), 5);
        assert!(sorted_contains(&vs, &[0.5, 1.0]));
        assert!(sorted_contains(&vs, &[1.0, 0.5]));
        assert!(!sorted_contains(&vs, &[1.0, 1.0]));
    }

    #[test]
    fn equality_row_restricts_to_the_simplex() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![0.0; 3],
            equalities: vec![Equality {
                coeffs: vec![1.0, 1.0, 1.0],
                rhs: 1.0,
            }],
            inequalities: vec![],
            bounds: vec![(0.0, 1.0); 3],
        };
        let vs = enumerate_vertices(&lp).unwrap();
        assert_eq!(vs.len(), 3);
        assert!(sorted_contains(&vs, &[1.0, 0.0, 0.0]));
        assert!(sorted_contains(&vs, &[0.0, 1.0, 0.0]));
        assert!(sorted_contains(&vs, &[0.0, 0.0, 1.0]));
    }

    #[test]
    fn duplicate_rows_do_not_duplicate_vertices() {
        let row = Inequality {
            coeffs: vec![1.0, 1.0],
            rhs: 1.0,
            direction: Direction::Le,
        };
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![1.0, 1.0],
            equalities: vec![],
            inequalities: vec![row.clone(), row],
            bounds: vec![(0.0, 1.0); 2],
        };
        let vs = enumerate_vertices(&lp).unwrap();
        assert_eq!(vs.len(), 3);
    }

    #[test]
    fn infeasible_regions_yield_no_vertices() {
        let lp = LinearProgram {
            sense: Sense::Minimize,
            objective: vec![1.0],
            equalities: vec![Equality {
                coeffs: vec![1.0],
                rhs: 2.0,
            }],
            inequalities: vec![],
            bounds: vec![(0.0, 1.0)],
        };
        assert!(enumerate_vertices(&lp).unwrap().is_empty());
    }

    #[test]
    fn variable_cap_is_enforced() {
        let lp = LinearProgram {
            sense: Sense::Minimize,
            objective: vec![0.0; 13],
            equalities: vec![],
            inequalities: vec![],
            bounds: vec![(0.0, 1.0); 13],
        };
        assert!(enumerate_vertices(&lp).is_err());
    }

    #[test]
    fn agrees_with_the_simplex_route() {
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective: vec![0.03, 0.09, 0.132],
            equalities: vec![Equality {
                coeffs: vec![1.0, 1.0, 1.0],
                rhs: 1.0,
            }],
            inequalities: vec![
                Inequality {
                    coeffs: vec![0.0, 0.0061, 0.01098],
                    rhs: 0.008,
                    direction: Direction::Le,
                },
                Inequality {
                    coeffs: vec![0.0, 0.10, 0.20],
                    rhs: 0.15,
                    direction: Direction::Le,
                },
            ],
            bounds: vec![(0.0, 1.0); 3],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let vs = enumerate_vertices(&lp).unwrap();
        assert!(!vs.is_empty());
        let best = vs
            .iter()
            .map(|v| lp.objective.iter().zip(v).map(|(c, x)| c * x).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - sol.objective_value).abs() < 1e-8);
    }
}
