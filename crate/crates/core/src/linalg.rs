//! Dense symmetric linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative eigenvalue cutoff for the spectral pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Spectral pseudoinverse of a symmetric matrix. Eigenvalues below
/// `PINV_CUTOFF · max(λ_max, 1)` are treated as zero.
pub fn sym_pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(m.clone());
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = PINV_CUTOFF * lmax.max(1.0);
    let mut out = DMatrix::zeros(n, n);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eig.eigenvectors.column(i);
            out += (v * v.transpose()) / lambda;
        }
    }
    symmetrize(&mut out);
    out
}

/// Minimum-norm solution of `A x = b` for symmetric positive semidefinite `A`.
pub fn psd_solve_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    sym_pinv(a) * b
}

/// Generalized Schur complement `M_DD − M_DR M_RR⁺ M_RD` of a symmetric
/// matrix onto the coordinates in `keep`.
pub fn schur_complement(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    let n = m.nrows();
    let mut is_kept = vec![false; n];
    for &i in keep {
        is_kept[i] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !is_kept[i]).collect();
    let dd = m.select_rows(keep).select_columns(keep);
    let dr = m.select_rows(keep).select_columns(&rest);
    let rr = m.select_rows(&rest).select_columns(&rest);
    let mut s = dd - &dr * sym_pinv(&rr) * dr.transpose();
    symmetrize(&mut s);
    s
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Orthonormal basis of `𝟙⊥` in `ℝᵗ` as the rows of a `(t−1)×t` matrix
/// (normalized Helmert contrasts).
pub fn contrast_basis(t: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(t.saturating_sub(1), t);
    for i in 1..t {
        let norm = ((i * (i + 1)) as f64).sqrt();
        for j in 0..i {
            h[(i - 1, j)] = 1.0 / norm;
        }
        h[(i - 1, i)] = -(i as f64) / norm;
    }
    h
}
