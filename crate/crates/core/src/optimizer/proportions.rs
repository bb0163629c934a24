//! Active classes and optimal proportions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symmetry::{CoefficientTable, GammaPoint};

/// Residual allowed in the proportion equations.
pub const PROPORTION_RESIDUAL_TOL: f64 = 1e-8;

/// Indices of the classes with `h_ℓ(γ*) ≥ h*·(1 − tol)`.
pub fn active_classes(tables: &[CoefficientTable], gamma: &GammaPoint, h_star: f64, tol: f64) -> Vec<usize> {
    let threshold = h_star - tol * h_star.abs();
    (0..tables.len()).filter(|&l| tables[l].h_value(gamma) >= threshold).collect()
}

/// Weights on the active classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionSolution {
    pub proportions: Vec<f64>,
    /// `‖[G; 1'] π − [0; 1]‖∞`.
    pub residual: f64,
    /// Dimension of the solution space of the linear system.
    pub degeneracy: usize,
}

/// Nonnegative least squares `min ‖M x − d‖` subject to `x ≥ 0`
/// (Lawson–Hanson active-set method).
pub fn nnls(m: &DMatrix<f64>, d: &DVector<f64>) -> DVector<f64> {
    let n = m.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let scale = m.amax().max(1.0) * d.amax().max(1.0);
    let tol = 1e-13 * scale * n.max(1) as f64;
    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])]);
        let svd = sub.svd(true, true);
        let smax = svd.singular_values.amax();
        let z = svd.solve(d, 1e-12 * smax.max(1e-300)).expect("SVD factors were computed");
        let mut full = DVector::zeros(n);
        for (j, &i) in idx.iter().enumerate() {
            full[i] = z[j];
        }
        full
    };
    for _ in 0..(3 * n + 10) {
        let w = m.transpose() * (d - m * &x);
        let candidate = (0..n).filter(|&j| !passive[j]).max_by(|&a, &b| w[a].total_cmp(&w[b])).filter(|&j| w[j] > tol);
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let z = solve_passive(&passive);
            if (0..n).filter(|&i| passive[i]).all(|i| z[i] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for i in (0..n).filter(|&i| passive[i] && z[i] <= 0.0) {
                alpha = alpha.min(x[i] / (x[i] - z[i]));
            }
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    x
}

/// Step 3: `π ≥ 0` with `Σ_ℓ π_ℓ ∇h_ℓ(γ*) = 0` and `Σ_ℓ π_ℓ = 1` over the
/// given active tables. When the system has several nonnegative solutions
/// the minimum-norm one is returned if it is nonnegative.
pub fn solve_proportions(active: &[&CoefficientTable], gamma: &GammaPoint) -> Result<ProportionSolution> {
    let n = active.len();
    if n == 0 {
        return Err(Error::NoProportions { residual: 1.0 });
    }
    let mut m = DMatrix::zeros(6, n);
    for (j, tbl) in active.iter().enumerate() {
        let g = tbl.h_gradient(gamma);
        for i in 0..5 {
            m[(i, j)] = g[i];
        }
        m[(5, j)] = 1.0;
    }
    let mut d = DVector::zeros(6);
    d[5] = 1.0;
    let residual_of = |x: &DVector<f64>| (&m * x - &d).amax();

    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.amax();
    let cutoff = 1e-10 * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let degeneracy = n - rank;

    let min_norm = svd.solve(&d, cutoff).expect("SVD factors were computed");
    let mut x = if min_norm.iter().all(|&p| p >= -1e-12) && residual_of(&min_norm) <= PROPORTION_RESIDUAL_TOL {
        min_norm.map(|p| p.max(0.0))
    } else {
        nnls(&m, &d)
    };
    let residual = residual_of(&x);
    if residual > PROPORTION_RESIDUAL_TOL {
        return Err(Error::NoProportions { residual });
    }
    let total = x.sum();
    x /= total;
    Ok(ProportionSolution { proportions: x.iter().copied().collect(), residual, degeneracy })
}
