//! Per-class coefficient tables `c_pq = tr(L₍p₎' C_s[ξ] L₍q₎)`, `p, q ∈ 1..=6`,
//! and the quadratics `h(γ) = Σ_{p,q} γ_p γ_q c_pq` with `γ₁ = 1`.
//!
//! For a symmetric design with class proportions `π_ℓ`,
//! `tr C_d[φ] / n = min_γ Σ_ℓ π_ℓ h_ℓ(γ)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classes::{enumerate_classes, EquivalenceClass};
use super::orbits::orbit_of;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Free components `γ₂ … γ₆` of `L_γ` (`γ₁ = 1`, `γ₇ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint(pub [f64; 5]);

impl GammaPoint {
    pub const ZERO: GammaPoint = GammaPoint([0.0; 5]);

    /// `(1, γ₂, …, γ₆)`.
    pub fn extended(&self) -> SVector<f64, 6> {
        let g = &self.0;
        SVector::from([1.0, g[0], g[1], g[2], g[3], g[4]])
    }

    pub fn as_vector(&self) -> SVector<f64, 5> {
        SVector::from(self.0)
    }

    pub fn from_vector(v: &SVector<f64, 5>) -> Self {
        GammaPoint([v[0], v[1], v[2], v[3], v[4]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Symmetric 6×6 table of `c_pq` for one class at a given `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<T = f64> {
    pub class: EquivalenceClass,
    pub t: usize,
    /// `c[p-1][q-1] = c_pq`.
    pub c: [[T; 6]; 6],
}

/// Per-column orbit counts `n_q(w) = #{j : (s_j, s_{j−1}, w) ∈ 𝒪_q}` for
/// `q = 1..=6`; period pairs landing in orbit 7 carry no weight in `L_γ`.
fn orbit_counts(labels: &[usize], w: usize) -> [i64; 6] {
    let mut n = [0i64; 6];
    let mut prev = 0;
    for &u in labels {
        let q = orbit_of(u, prev, w);
        if q <= 6 {
            n[q - 1] += 1;
        }
        prev = u;
    }
    n
}

/// Computes the table from `c_pq = Σ_w m_p(w)' Q_k m_q(w)` where
/// `m_q(w) = X_s L₍q₎ e_w` is a 0/1 vector over periods. Each period lands in
/// exactly one orbit per column, so `m_p(w)·m_q(w) = δ_pq n_p(w)` and
/// `c_pq = δ_pq Σ_w n_p(w) − Σ_w n_p(w) n_q(w) / k`. Columns for labels
/// that do not occur in the sequence all give the same counts.
pub fn coefficients_in<T: Scalar>(class: &EquivalenceClass, t: usize) -> Result<CoefficientTable<T>> {
    let m = class.block_count();
    if m > t {
        return Err(Error::TooManyBlocks { blocks: m, t });
    }
    let labels = class.labels();
    let k = labels.len() as i64;

    // integer accumulators: diag[p] = Σ_w n_p(w), cross[p][q] = Σ_w n_p(w) n_q(w)
    let mut diag = [0i64; 6];
    let mut cross = [[0i64; 6]; 6];
    let mut add = |n: [i64; 6], mult: i64| {
        for p in 0..6 {
            diag[p] += mult * n[p];
            for q in 0..6 {
                cross[p][q] += mult * n[p] * n[q];
            }
        }
    };
    for w in 1..=m {
        add(orbit_counts(labels, w), 1);
    }
    if t > m {
        add(orbit_counts(labels, m + 1), (t - m) as i64);
    }

    let c = std::array::from_fn(|p| {
        std::array::from_fn(|q| {
            let d = if p == q { diag[p] } else { 0 };
            T::from_int(d) - T::from_ratio(cross[p][q], k)
        })
    });
    Ok(CoefficientTable { class: class.clone(), t, c })
}

/// Floating-point coefficient table.
pub fn coefficients(class: &EquivalenceClass, t: usize) -> Result<CoefficientTable> {
    coefficients_in::<f64>(class, t)
}

impl<T: Scalar> CoefficientTable<T> {
    /// `h(γ)` for `γ = (γ₂, …, γ₆)` in any scalar mode.
    pub fn h_exact(&self, gamma: &[T; 5]) -> T {
        let ext: [T; 6] = std::array::from_fn(|i| if i == 0 { T::one() } else { gamma[i - 1].clone() });
        let mut acc = T::zero();
        for p in 0..6 {
            for q in 0..6 {
                acc = acc + ext[p].clone() * ext[q].clone() * self.c[p][q].clone();
            }
        }
        acc
    }

    pub fn to_f64(&self) -> CoefficientTable<f64> {
        CoefficientTable {
            class: self.class.clone(),
            t: self.t,
            c: std::array::from_fn(|p| std::array::from_fn(|q| self.c[p][q].to_f64())),
        }
    }
}

impl CoefficientTable<f64> {
    pub fn matrix(&self) -> SMatrix<f64, 6, 6> {
        SMatrix::from_fn(|p, q| self.c[p][q])
    }

    /// Constant term `c₁₁`.
    pub fn constant(&self) -> f64 {
        self.c[0][0]
    }

    /// Linear coefficients `b_p = c_{1p}`, `p = 2..=6`.
    pub fn linear(&self) -> SVector<f64, 5> {
        SVector::from_fn(|i, _| self.c[0][i + 1])
    }

    /// Quadratic block `A = (c_pq)_{p,q=2..=6}`.
    pub fn quadratic(&self) -> SMatrix<f64, 5, 5> {
        SMatrix::from_fn(|p, q| self.c[p + 1][q + 1])
    }

    /// `h(γ) = c₁₁ + 2 b'γ + γ'Aγ`.
    pub fn h_value(&self, gamma: &GammaPoint) -> f64 {
        let g = gamma.as_vector();
        self.constant() + 2.0 * self.linear().dot(&g) + g.dot(&(self.quadratic() * g))
    }

    /// `∂h/∂γ_p = 2 Σ_q γ_q c_pq` for `p = 2..=6` (with `γ₁ = 1`).
    pub fn h_gradient(&self, gamma: &GammaPoint) -> SVector<f64, 5> {
        (self.quadratic() * gamma.as_vector() + self.linear()) * 2.0
    }

    /// Hessian `2A`.
    pub fn h_hessian(&self) -> SMatrix<f64, 5, 5> {
        self.quadratic() * 2.0
    }

    /// `min_γ h(γ)` and a minimizer; the inner problem is an unconstrained
    /// convex quadratic solved with a pseudoinverse.
    pub fn minimum(&self) -> (f64, GammaPoint) {
        let a = DMatrix::from_fn(5, 5, |i, j| self.quadratic()[(i, j)]);
        let b = DVector::from_fn(5, |i, _| self.linear()[i]);
        let g = -crate::linalg::psd_solve_min_norm(&a, &b);
        let gamma = GammaPoint([g[0], g[1], g[2], g[3], g[4]]);
        (self.h_value(&gamma).max(0.0), gamma)
    }
}

/// Tables for every class with `k` periods and at most `t` labels, in
/// lexicographic class order. Computed in parallel; the order is fixed.
pub fn all_tables(k: usize, t: usize) -> Result<Vec<CoefficientTable>> {
    let classes = enumerate_classes(k, t)?;
    classes.par_iter().map(|c| coefficients(c, t)).collect()
}

/// Exact tables for every class.
pub fn all_tables_exact(k: usize, t: usize) -> Result<Vec<CoefficientTable<Rational>>> {
    let classes = enumerate_classes(k, t)?;
    classes.par_iter().map(|c| coefficients_in::<Rational>(c, t)).collect()
}

/// Memoizes tables per `(class, t)`, keyed by the canonical class string.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    tables: Mutex<HashMap<(String, usize), Arc<CoefficientTable>>>,
}

impl CoefficientCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, class: &EquivalenceClass, t: usize) -> Result<Arc<CoefficientTable>> {
        let key = (class.canonical_string(), t);
        if let Some(hit) = self.tables.lock().expect("cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let table = Arc::new(coefficients(class, t)?);
        self.tables.lock().expect("cache poisoned").insert(key, Arc::clone(&table));
        Ok(table)
    }

    /// Tables for all classes of `k` periods on `t` treatments.
    pub fn tables_for(&self, k: usize, t: usize) -> Result<Vec<CoefficientTable>> {
        let classes = enumerate_classes(k, t)?;
        classes.par_iter().map(|c| self.get(c, t).map(|a| (*a).clone())).collect()
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
