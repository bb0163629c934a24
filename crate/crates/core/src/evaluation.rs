//! Efficiency of designs relative to the universal optimum.
//!
//! An optimal design of size `n` has information matrix
//! `C* = n h* / (t − 1) · Q_t`, so every contrast eigenvalue equals
//! `v* = n h* / (t − 1)`. Efficiencies compare the contrast eigenvalues of a
//! design with `v*` under the trace, A-, D- and E-criteria.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::design::{DesignRef, ExactDesign};
use crate::error::{Error, Result};
use crate::info::{info_phi, info_phi_periods, info_theta_design, info_xi_design, InfoMatrixPhi};
use crate::linalg::{contrast_basis, max_abs, sym_eigenvalues};
use crate::optimizer::MaximinSolution;

/// Relative tolerance (to `‖C‖∞`) for complete symmetry.
pub const COMPLETE_SYMMETRY_TOL: f64 = 1e-9;
/// Contrast eigenvalues below this multiple of `v*` count as zero.
pub const ESTIMABILITY_TOL: f64 = 1e-9;
/// Relative tolerance for agreement of the two period models.
pub const PERIOD_MODEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub trace_eff: f64,
    pub a_eff: f64,
    pub d_eff: f64,
    pub e_eff: f64,
    pub completely_symmetric: bool,
    pub estimable: bool,
    /// The `t − 1` eigenvalues of `C_d[φ]` on the contrasts, ascending.
    pub contrast_eigenvalues: Vec<f64>,
    /// `tr C_d[φ]`.
    pub trace: f64,
    /// Whether the model with period effects was used.
    pub with_periods: bool,
}

/// Eigenvalues of `C` restricted to the orthogonal complement of `𝟙`.
pub fn contrast_eigenvalues(c: &DMatrix<f64>) -> Vec<f64> {
    let h = contrast_basis(c.nrows());
    sym_eigenvalues(&(&h * c * h.transpose()))
}

/// Whether `C = aI + bJ` up to `tol` on the spread of the diagonal and of
/// the off-diagonal entries.
pub fn is_completely_symmetric(c: &DMatrix<f64>, tol: f64) -> bool {
    let t = c.nrows();
    let diag: Vec<f64> = (0..t).map(|i| c[(i, i)]).collect();
    let off: Vec<f64> = (0..t).flat_map(|i| (0..t).filter(move |&j| j != i).map(move |j| c[(i, j)])).collect();
    let spread = |v: &[f64]| {
        if v.is_empty() {
            return 0.0;
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
    };
    spread(&diag) <= tol && spread(&off) <= tol
}

/// Default tolerance `1e-9·‖C‖∞` (maximum absolute row sum).
pub fn default_symmetry_tol(c: &DMatrix<f64>) -> f64 {
    let norm = c.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    COMPLETE_SYMMETRY_TOL * norm
}

fn phi_matrix(d: DesignRef<'_>, with_periods: bool) -> Result<InfoMatrixPhi> {
    if with_periods {
        info_phi_periods(&info_theta_design(d))
    } else {
        info_phi(&info_xi_design(d))
    }
}

/// Efficiencies of `d` against an optimal value `h*` for the same `(k, t)`.
/// Complete symmetry is tested at `1e-9·max(‖C‖∞, n)`.
pub fn evaluate_against<'a>(d: impl Into<DesignRef<'a>>, h_star: f64, with_periods: bool) -> Result<EfficiencyReport> {
    let d = d.into();
    let t = d.t();
    let c = phi_matrix(d, with_periods)?.matrix;
    let lambda = contrast_eigenvalues(&c);
    let v_star = d.size() * h_star / (t - 1) as f64;
    let m = (t - 1) as f64;
    let estimable = lambda.iter().all(|&l| l > ESTIMABILITY_TOL * v_star);
    let (a_eff, d_eff, e_eff) = if estimable {
        let harmonic = m / lambda.iter().map(|l| 1.0 / l).sum::<f64>();
        let geometric = (lambda.iter().map(|l| l.ln()).sum::<f64>() / m).exp();
        (harmonic / v_star, geometric / v_star, lambda[0] / v_star)
    } else {
        (0.0, 0.0, 0.0)
    };
    let trace_eff = if estimable { lambda.iter().sum::<f64>() / (m * v_star) } else { 0.0 };
    Ok(EfficiencyReport {
        trace_eff,
        a_eff,
        d_eff,
        e_eff,
        completely_symmetric: is_completely_symmetric(
            &c,
            default_symmetry_tol(&c).max(COMPLETE_SYMMETRY_TOL * d.size()),
        ),
        estimable,
        contrast_eigenvalues: lambda,
        trace: c.trace(),
        with_periods,
    })
}

/// Efficiencies of an exact design relative to the maximin solution for its `(k, t)`.
pub fn evaluate(d: &ExactDesign, optimum: &MaximinSolution, with_periods: bool) -> Result<EfficiencyReport> {
    if d.k() != optimum.k || d.t() != optimum.t {
        return Err(Error::Inconsistent(format!(
            "design has k={}, t={} but the optimum is for k={}, t={}",
            d.k(),
            d.t(),
            optimum.k,
            optimum.t
        )));
    }
    evaluate_against(d, optimum.h_star, with_periods)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodComparison {
    pub trace_plain: f64,
    pub trace_periods: f64,
    /// Largest entrywise difference `|C̃_d[φ] − C_d[φ]|`.
    pub max_difference: f64,
    pub equal: bool,
}

/// `C_d[φ]` with and without period effects.
pub fn compare_period_models<'a>(d: impl Into<DesignRef<'a>>) -> Result<PeriodComparison> {
    let d = d.into();
    let plain = info_phi(&info_xi_design(d))?.matrix;
    let periods = info_phi_periods(&info_theta_design(d))?.matrix;
    let max_difference = max_abs(&(&periods - &plain));
    Ok(PeriodComparison {
        trace_plain: plain.trace(),
        trace_periods: periods.trace(),
        max_difference,
        equal: max_difference <= PERIOD_MODEL_TOL * max_abs(&plain).max(1.0),
    })
}
