//! Brute-force convex-hull membership oracle: discretize the classical curve
//! and solve the L1 feasibility LP
//!
//! ```text
//!   minimize  Σ(s⁺ + s⁻)   subject to   Σ_j w_j Π(t_j) + s⁺ - s⁻ = P,
//!                                        Σ_j w_j = 1,  w, s⁺, s⁻ ≥ 0.
//! ```
//!
//! A zero optimum means `P` lies in the hull of the discretized curve. Grid
//! columns are locally refined around the active support so that points on
//! (or inside) the true hull reach residuals below the slack tolerance
//! instead of stalling at the coarse-grid discretization error, while points
//! outside keep a residual at least their true distance to the hull.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CurveSpec;
use crate::states::{EfficiencySettings, NoClickVector};

/// Slack tolerance: residuals at or below this count as feasible.
pub const TAU_LP: f64 = 1e-9;
/// Default number of uniform grid points.
pub const DEFAULT_GRID: usize = 2001;
/// Local refinement passes around the active support.
const REFINE_ROUNDS: usize = 3;

/// Outcome of the hull-membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullFeasibility {
    pub feasible: bool,
    /// Optimal L1 slack of the feasibility LP.
    pub residual: f64,
    /// Representing measure `(t, weight)` on the active support.
    pub support: Vec<(f64, f64)>,
}

/// Tests whether `P` is a convex combination of curve points, discretizing
/// `t` into `grid` uniform points plus local refinements.
pub fn hull_membership_oracle(
    p: &NoClickVector,
    settings: &EfficiencySettings,
    grid: usize,
) -> Result<HullFeasibility> {
    if grid < 2 {
        return Err(Error::Contract(format!("grid must be at least 2, got {grid}")));
    }
    if settings.len() != p.len() {
        return Err(Error::Contract(format!(
            "settings ({}) and probabilities ({}) disagree on N",
            settings.len(),
            p.len()
        )));
    }
    let spec = CurveSpec::from_settings(settings);
    let mut ts: Vec<f64> = (0..grid).map(|j| j as f64 / (grid - 1) as f64).collect();
    let mut spacing = 1.0 / (grid - 1) as f64;

    let mut best: Option<(f64, Vec<(f64, f64)>)> = None;
    for _ in 0..=REFINE_ROUNDS {
        let (residual, support) = solve_l1(&spec, p.as_slice(), &ts)?;
        let done = residual <= TAU_LP;
        best = Some((residual, support.clone()));
        if done {
            break;
        }
        // refine around active support points
        spacing /= 16.0;
        let mut extra = Vec::new();
        for &(t, _) in &support {
            for k in 1..16 {
                let d = spacing * k as f64;
                if t - d > 0.0 {
                    extra.push(t - d);
                }
                if t + d < 1.0 {
                    extra.push(t + d);
                }
            }
        }
        if extra.is_empty() {
            break;
        }
        ts.extend(extra);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
    }
    let (residual, support) = best.expect("at least one LP solve");
    Ok(HullFeasibility { feasible: residual <= TAU_LP, residual, support })
}

/// Dense tableau simplex for the L1 feasibility problem. Starts from the
/// basis `{s⁺₁ … s⁺_N, w(t=0)}`, which is feasible because `Π(0) = 0`.
fn solve_l1(spec: &CurveSpec, p: &[f64], ts: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
    let n = p.len();
    let rows = n + 1;
    let k = ts.len();
    let cols = k + 2 * n;
    debug_assert!(ts[0] == 0.0, "grid must contain t = 0 for the initial basis");

    // tableau[r][c], last column is the rhs
    let mut t = vec![vec![0.0f64; cols + 1]; rows];
    for (j, &tj) in ts.iter().enumerate() {
        let point = spec.point(tj)?;
        for r in 0..n {
            t[r][j] = point[r];
        }
        t[rows - 1][j] = 1.0;
    }
    for r in 0..n {
        t[r][k + r] = 1.0; // s+
        t[r][k + n + r] = -1.0; // s-
        t[r][cols] = p[r];
    }
    t[rows - 1][cols] = 1.0;

    let cost = |j: usize| if j >= k { 1.0 } else { 0.0 };
    let mut basis: Vec<usize> = (0..n).map(|r| k + r).collect();
    basis.push(0); // w(t=0)

    // reduced-cost row: z_j = c_j - c_B^T T_j (the rhs cell is unused; the
    // residual is recomputed from the primal solution at the end)
    let mut z = vec![0.0f64; cols + 1];
    for j in 0..cols {
        let mut acc = 0.0;
        for r in 0..rows {
            acc += cost(basis[r]) * t[r][j];
        }
        z[j] = cost(j) - acc;
    }

    const PIVOT_EPS: f64 = 1e-11;
    const MAX_ITERS: usize = 50_000;
    let mut iters = 0usize;
    loop {
        iters += 1;
        if iters > MAX_ITERS {
            return Err(Error::NoConvergence(format!(
                "simplex exceeded {MAX_ITERS} iterations on {k} columns"
            )));
        }
        // entering column: Dantzig rule early, Bland once degeneracy drags on
        let bland = iters > 5_000;
        let mut enter: Option<usize> = None;
        let mut best_z = -PIVOT_EPS;
        for j in 0..cols {
            if z[j] < best_z {
                enter = Some(j);
                if bland {
                    break;
                }
                best_z = z[j];
            }
        }
        let Some(enter) = enter else { break };

        // ratio test
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            if t[r][enter] > PIVOT_EPS {
                let ratio = t[r][cols] / t[r][enter];
                if ratio < best_ratio - 1e-15
                    || (ratio < best_ratio + 1e-15
                        && leave.is_some_and(|l| basis[r] < basis[l]))
                {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::NoConvergence("unbounded feasibility LP".into()));
        };

        // pivot
        let piv = t[leave][enter];
        for c in 0..=cols {
            t[leave][c] /= piv;
        }
        for r in 0..rows {
            if r != leave {
                let factor = t[r][enter];
                if factor != 0.0 {
                    for c in 0..=cols {
                        t[r][c] -= factor * t[leave][c];
                    }
                }
            }
        }
        let zf = z[enter];
        if zf != 0.0 {
            for c in 0..=cols {
                z[c] -= zf * t[leave][c];
            }
        }
        basis[leave] = enter;
    }

    // recover the primal solution and recompute the residual from scratch
    let mut w = vec![0.0f64; k];
    for (r, &b) in basis.iter().enumerate() {
        if b < k {
            w[b] = t[r][cols].max(0.0);
        }
    }
    let mut recon = vec![0.0f64; n];
    for (j, &wj) in w.iter().enumerate() {
        if wj > 0.0 {
            let point = spec.point(ts[j])?;
            for r in 0..n {
                recon[r] += wj * point[r];
            }
        }
    }
    let residual: f64 = recon.iter().zip(p).map(|(a, b)| (a - b).abs()).sum();
    let support: Vec<(f64, f64)> = w
        .iter()
        .enumerate()
        .filter(|(_, &wj)| wj > 1e-12)
        .map(|(j, &wj)| (ts[j], wj))
        .collect();
    Ok((residual, support))
}
