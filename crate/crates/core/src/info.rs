//! Design matrices and information matrices.
//!
//! The carry-over parameter vector `ξ` is indexed by pairs `(u, v)` with
//! `u ∈ 1..=t` the current treatment and `v ∈ 0..=t` its predecessor (0 is the
//! fictitious treatment before the first period), in lexicographic order; see
//! [`pair_index`]. Subject effects are removed by the within-subject centering
//! `Q_k = I_k − J_k / k`, so `C_s[ξ] = X_s' Q_k X_s` for one sequence.
//!
//! The information matrix for the total effects `φ_u = ξ_uu` is the Loewner
//! minimum of `L' C[ξ] L` over `L' K = I`. Because `K` selects exactly the
//! diagonal pairs `(u, u)`, writing `L = K + U M` with `U` the injection of the
//! other `t²` coordinates turns that minimum into the generalized Schur
//! complement of `C[ξ]` onto the diagonal pairs, which is what [`info_phi`]
//! computes.

use nalgebra::DMatrix;

use crate::design::{DesignRef, TreatmentSequence};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

pub use crate::perm::pair_index;

/// Tolerance (relative to `max(1, ‖C‖)`) for the symmetry and
/// semidefiniteness checks on inputs to the Schur reduction.
pub const VALIDATION_TOL: f64 = 1e-9;

/// `C_d[ξ]`, dimension `t(t+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoMatrixXi {
    pub matrix: DMatrix<f64>,
    pub t: usize,
    /// Number of subjects (or nominal size) the matrix is scaled to.
    pub scale: f64,
}

/// `C_d[φ]`, a `t×t` matrix with zero row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoMatrixPhi {
    pub matrix: DMatrix<f64>,
}

impl InfoMatrixPhi {
    pub fn t(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Largest absolute row sum (zero in exact arithmetic).
    pub fn max_row_sum(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }
}

/// `C̃_d[θ]` for `θ' = (ξ', α')` under the model with period effects,
/// dimension `t(t+1) + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodInfoMatrix {
    pub matrix: DMatrix<f64>,
    pub t: usize,
    pub k: usize,
    pub scale: f64,
}

impl PeriodInfoMatrix {
    fn split(&self) -> usize {
        self.t * (self.t + 1)
    }

    /// Upper-left block `C_d[ξ]`.
    pub fn c11(&self) -> DMatrix<f64> {
        let p = self.split();
        self.matrix.view((0, 0), (p, p)).into_owned()
    }

    /// Upper-right block `C_d12 = X_d' ω⊥_B A`.
    pub fn c12(&self) -> DMatrix<f64> {
        let p = self.split();
        self.matrix.view((0, p), (p, self.k)).into_owned()
    }

    /// Lower-right block `C_d22 = n Q_k`.
    pub fn c22(&self) -> DMatrix<f64> {
        let p = self.split();
        self.matrix.view((p, p), (self.k, self.k)).into_owned()
    }
}

/// `k × t(t+1)` 0/1 matrix: row `j` has its single 1 at column `(s_j, s_{j−1})`.
pub fn design_matrix(s: &TreatmentSequence) -> DMatrix<f64> {
    let t = s.t();
    let mut x = DMatrix::zeros(s.k(), t * (t + 1));
    for j in 0..s.k() {
        x[(j, pair_index(t, s.entries()[j], s.predecessor(j)))] = 1.0;
    }
    x
}

/// `Q_k = I_k − J_k / k`.
pub fn centering_matrix<T: Scalar>(k: usize) -> DMatrix<T> {
    assert!(k >= 1, "centering matrix needs k >= 1");
    let off = T::from_ratio(-1, k as i64);
    let diag = T::one() + off.clone();
    DMatrix::from_fn(k, k, |i, j| if i == j { diag.clone() } else { off.clone() })
}

/// Column of `ξ` hit by period `j` of `s`.
#[inline]
fn column(s: &TreatmentSequence, j: usize) -> usize {
    pair_index(s.t(), s.entries()[j], s.predecessor(j))
}

/// Adds `weight · X_s' Q_k X_s` into `acc` without forming `X_s`.
fn accumulate_xi<T: Scalar>(acc: &mut DMatrix<T>, s: &TreatmentSequence, weight: &T) {
    let k = s.k();
    let q = centering_matrix::<T>(k);
    for j1 in 0..k {
        let a = column(s, j1);
        for j2 in 0..k {
            let b = column(s, j2);
            let add = weight.clone() * q[(j1, j2)].clone();
            acc[(a, b)] = acc[(a, b)].clone() + add;
        }
    }
}

/// `C_s[ξ] = X_s' Q_k X_s` in any scalar mode.
pub fn info_xi_sequence_in<T: Scalar>(s: &TreatmentSequence) -> DMatrix<T> {
    let dim = s.t() * (s.t() + 1);
    let mut c = DMatrix::from_element(dim, dim, T::zero());
    accumulate_xi(&mut c, s, &T::one());
    c
}

/// `C_s[ξ]` for a single sequence (scale 1).
pub fn info_xi_sequence(s: &TreatmentSequence) -> InfoMatrixXi {
    InfoMatrixXi { matrix: info_xi_sequence_in::<f64>(s), t: s.t(), scale: 1.0 }
}

/// `C_d[ξ] = n Σ_s π_d(s) C_s[ξ]`, summed in the design's fixed sequence order.
pub fn info_xi_design<'a>(d: impl Into<DesignRef<'a>>) -> InfoMatrixXi {
    let d = d.into();
    let t = d.t();
    let dim = t * (t + 1);
    let mut c = DMatrix::zeros(dim, dim);
    for (s, w) in d.weighted_sequences() {
        accumulate_xi(&mut c, s, &w);
    }
    InfoMatrixXi { matrix: c, t, scale: d.size() }
}

/// Indices of the diagonal pairs `(u, u)`, i.e. the columns selected by `K`.
pub fn total_effect_indices(t: usize) -> Vec<usize> {
    (1..=t).map(|u| pair_index(t, u, u)).collect()
}

fn validate_psd(m: &DMatrix<f64>) -> Result<()> {
    let scale = linalg::max_abs(m).max(1.0);
    let asym = linalg::max_asymmetry(m);
    if asym > VALIDATION_TOL * scale {
        return Err(Error::Asymmetric(asym));
    }
    let ev = linalg::sym_eigenvalues(m);
    if let Some(&lmin) = ev.first() {
        let lmax = ev.last().copied().unwrap_or(0.0).max(1.0);
        if lmin < -VALIDATION_TOL * lmax {
            return Err(Error::Indefinite(lmin));
        }
    }
    Ok(())
}

/// `C_d[φ]`: the Schur complement of `C_d[ξ]` onto the diagonal pairs.
pub fn info_phi(c: &InfoMatrixXi) -> Result<InfoMatrixPhi> {
    let dim = c.t * (c.t + 1);
    if c.matrix.nrows() != dim || c.matrix.ncols() != dim {
        return Err(Error::Inconsistent(format!(
            "expected a {dim}x{dim} matrix for t={}, got {}x{}",
            c.t,
            c.matrix.nrows(),
            c.matrix.ncols()
        )));
    }
    validate_psd(&c.matrix)?;
    Ok(InfoMatrixPhi { matrix: linalg::schur_complement(&c.matrix, &total_effect_indices(c.t)) })
}

/// Adds `weight · [[X'QX, X'Q], [QX, Q]]` for one sequence.
fn accumulate_theta(acc: &mut DMatrix<f64>, s: &TreatmentSequence, weight: f64) {
    let k = s.k();
    let p = s.t() * (s.t() + 1);
    let q = centering_matrix::<f64>(k);
    for j1 in 0..k {
        let a = column(s, j1);
        for j2 in 0..k {
            let b = column(s, j2);
            let v = weight * q[(j1, j2)];
            acc[(a, b)] += v;
            acc[(a, p + j2)] += v;
            acc[(p + j1, b)] += v;
            acc[(p + j1, p + j2)] += v;
        }
    }
}

/// `C̃_d[θ] = n Σ_s π_d(s) [[X_s'Q_kX_s, X_s'Q_k], [Q_kX_s, Q_k]]`.
pub fn info_theta_design<'a>(d: impl Into<DesignRef<'a>>) -> PeriodInfoMatrix {
    let d = d.into();
    let (t, k) = (d.t(), d.k());
    let dim = t * (t + 1) + k;
    let mut m = DMatrix::zeros(dim, dim);
    for (s, w) in d.weighted_sequences() {
        accumulate_theta(&mut m, s, w);
    }
    PeriodInfoMatrix { matrix: m, t, k, scale: d.size() }
}

/// `C̃_d[φ]`: the Schur complement of `C̃_d[θ]` onto the diagonal pairs.
pub fn info_phi_periods(m: &PeriodInfoMatrix) -> Result<InfoMatrixPhi> {
    let dim = m.t * (m.t + 1) + m.k;
    if m.matrix.nrows() != dim || m.matrix.ncols() != dim {
        return Err(Error::Inconsistent(format!("expected a {dim}x{dim} matrix for t={}, k={}", m.t, m.k)));
    }
    validate_psd(&m.matrix)?;
    Ok(InfoMatrixPhi { matrix: linalg::schur_complement(&m.matrix, &total_effect_indices(m.t)) })
}
