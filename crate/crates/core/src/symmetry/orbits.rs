//! The seven orbits of `S_t` acting on `{1..t} × {0..t} × {1..t}` by
//! `(u, v, w) ↦ (σ(u), σ*(v), σ(w))`, and their indicator matrices `L₍q₎`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::perm::pair_index;

/// Number of orbits.
pub const ORBIT_COUNT: usize = 7;

/// Orbit (1..=7) containing the triple `(u, v, w)`, where `(u, v)` indexes a
/// row of `L` and `w` a column.
#[inline]
pub fn orbit_of(u: usize, v: usize, w: usize) -> usize {
    if v == 0 {
        if w == u {
            5
        } else {
            6
        }
    } else if v == u {
        if w == u {
            1
        } else {
            7
        }
    } else if w == u {
        2
    } else if w == v {
        3
    } else {
        4
    }
}

/// The matrices `L₍1₎ … L₍7₎`, each `t(t+1) × t`.
#[derive(Debug, Clone)]
pub struct OrbitBasis {
    pub t: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl OrbitBasis {
    /// `L₍q₎` for `q ∈ 1..=7`.
    pub fn matrix(&self, q: usize) -> &DMatrix<f64> {
        &self.matrices[q - 1]
    }

    /// Number of triples in each orbit.
    pub fn support_sizes(&self) -> [usize; ORBIT_COUNT] {
        let mut sizes = [0; ORBIT_COUNT];
        for (q, m) in self.matrices.iter().enumerate() {
            sizes[q] = m.iter().filter(|&&x| x != 0.0).count();
        }
        sizes
    }

    /// `K`, the selector of the diagonal pairs. Equal to `L₍1₎`.
    pub fn selector(&self) -> DMatrix<f64> {
        let t = self.t;
        let mut k = DMatrix::zeros(t * (t + 1), t);
        for u in 1..=t {
            k[(pair_index(t, u, u), u - 1)] = 1.0;
        }
        k
    }

    /// `L_γ = L₍1₎ + Σ_{q=2}^{6} γ_q L₍q₎`.
    pub fn combination(&self, gamma: &[f64; 5]) -> DMatrix<f64> {
        let mut l = self.matrices[0].clone();
        for (i, g) in gamma.iter().enumerate() {
            l += &self.matrices[i + 1] * *g;
        }
        l
    }
}

pub fn orbit_basis(t: usize) -> Result<OrbitBasis> {
    if t < 2 {
        return Err(Error::TooFewTreatments { t, min: 2 });
    }
    let mut matrices = vec![DMatrix::zeros(t * (t + 1), t); ORBIT_COUNT];
    for u in 1..=t {
        for v in 0..=t {
            for w in 1..=t {
                matrices[orbit_of(u, v, w) - 1][(pair_index(t, u, v), w - 1)] = 1.0;
            }
        }
    }
    Ok(OrbitBasis { t, matrices })
}
