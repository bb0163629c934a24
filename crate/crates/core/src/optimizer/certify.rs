//! Certificates of maximin optimality.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::psd_solve_min_norm;
use crate::symmetry::{CoefficientTable, GammaPoint};

/// Slack on global dominance, relative to `max(1, h*)`.
pub const DOMINANCE_TOL: f64 = 1e-9;
/// Bound on `‖Σ π_ℓ ∇h_ℓ(γ*)‖∞`.
pub const STATIONARITY_TOL: f64 = 1e-8;
/// Bound on `|Σ π_ℓ − 1|`.
pub const SUM_TOL: f64 = 1e-10;
/// Bound on `|min_γ Σ π_ℓ h_ℓ(γ) − h*|`, relative to `max(1, h*)`.
pub const DUALITY_TOL: f64 = 1e-9;

/// Numerical evidence that `(γ*, h*, π*)` solves the maximin problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// `max_ℓ h_ℓ(γ*) − h*` over all classes.
    pub max_inactive_gap: f64,
    /// `‖Σ π_ℓ ∇h_ℓ(γ*)‖∞`.
    pub kkt_residual: f64,
    pub min_proportion: f64,
    pub proportion_sum_error: f64,
    /// `min_γ Σ π_ℓ h_ℓ(γ)`, the value guaranteed by the mixture.
    pub dual_value: f64,
    /// Dimension of the set of proportion vectors solving the stationarity system.
    pub degeneracy: usize,
}

/// `min_γ Σ_ℓ w_ℓ h_ℓ(γ)` over the full `γ` space.
pub fn mixture_minimum(weighted: &[(&CoefficientTable, f64)]) -> f64 {
    let mut c = 0.0;
    let mut b = DVector::<f64>::zeros(5);
    let mut a = DMatrix::<f64>::zeros(5, 5);
    for (tbl, w) in weighted {
        c += w * tbl.constant();
        let (tb, ta) = (tbl.linear(), tbl.quadratic());
        for i in 0..5 {
            b[i] += w * tb[i];
            for j in 0..5 {
                a[(i, j)] += w * ta[(i, j)];
            }
        }
    }
    let g = -psd_solve_min_norm(&a, &b);
    c + 2.0 * b.dot(&g) + g.dot(&(&a * &g))
}

/// Checks (a) dominance over all classes, (b) stationarity, (c) proportions
/// nonnegative and summing to one, (d) the mixture minimum equals `h*`.
/// `active` pairs indices into `tables` with proportions.
pub fn certify(
    tables: &[CoefficientTable],
    gamma: &GammaPoint,
    h_star: f64,
    active: &[(usize, f64)],
    degeneracy: usize,
) -> Result<Certificate> {
    let scale = h_star.abs().max(1.0);
    let max_inactive_gap = tables.iter().map(|t| t.h_value(gamma) - h_star).fold(f64::NEG_INFINITY, f64::max);
    let mut stat = nalgebra::SVector::<f64, 5>::zeros();
    for &(l, p) in active {
        stat += tables[l].h_gradient(gamma) * p;
    }
    let kkt_residual = stat.amax();
    let min_proportion = active.iter().map(|&(_, p)| p).fold(f64::INFINITY, f64::min);
    let proportion_sum_error = (active.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs();
    let weighted: Vec<(&CoefficientTable, f64)> = active.iter().map(|&(l, p)| (&tables[l], p)).collect();
    let dual_value = mixture_minimum(&weighted);
    let cert =
        Certificate { max_inactive_gap, kkt_residual, min_proportion, proportion_sum_error, dual_value, degeneracy };

    if max_inactive_gap > DOMINANCE_TOL * scale {
        return Err(Error::Certificate {
            check: "dominance",
            detail: format!("a class exceeds h* by {max_inactive_gap:e}"),
        });
    }
    if kkt_residual > STATIONARITY_TOL {
        return Err(Error::Certificate {
            check: "stationarity",
            detail: format!("gradient combination has norm {kkt_residual:e}"),
        });
    }
    if active.is_empty() || min_proportion < 0.0 || proportion_sum_error > SUM_TOL {
        return Err(Error::Certificate {
            check: "proportions",
            detail: format!("minimum {min_proportion:e}, sum error {proportion_sum_error:e}"),
        });
    }
    if (dual_value - h_star).abs() > DUALITY_TOL * scale {
        return Err(Error::Certificate {
            check: "duality",
            detail: format!("mixture minimum {dual_value} differs from h* = {h_star}"),
        });
    }
    Ok(cert)
}
