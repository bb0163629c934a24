//! Independent computations used to cross-check the library.

use nalgebra::{DMatrix, DVector};

use xover_core::info::info_xi_design;
use xover_core::symmetry::orbit_basis;
use xover_core::{ExactDesign, TreatmentSequence};

/// Minimizes `y' C y` over `y` with the diagonal-pair coordinates fixed to
/// `x`, by conjugate gradients on the free block from a zero start.
pub fn quadratic_minimum(c: &DMatrix<f64>, fixed: &[usize], x: &DVector<f64>) -> f64 {
    let n = c.nrows();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let c_ff = c.select_rows(&free).select_columns(&free);
    let c_fx = c.select_rows(&free).select_columns(fixed);
    let c_xx = c.select_rows(fixed).select_columns(fixed);
    let b = -(&c_fx * x);
    let mut z = DVector::zeros(free.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..(10 * free.len()) {
        if rr.sqrt() <= 1e-14 * (1.0 + b.norm()) {
            break;
        }
        let ap = &c_ff * &p;
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        z += &p * alpha;
        r -= &ap * alpha;
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    x.dot(&(&c_xx * x)) + 2.0 * x.dot(&(c_fx.transpose() * &z)) + z.dot(&(&c_ff * &z))
}

/// Dense `c_pq = tr(L₍p₎' C_s L₍q₎)` for `p, q ∈ 1..=6`.
pub fn dense_coefficients(s: &TreatmentSequence) -> [[f64; 6]; 6] {
    let basis = orbit_basis(s.t()).unwrap();
    let c = info_xi_design(&ExactDesign::new(vec![s.clone()]).unwrap()).matrix;
    std::array::from_fn(|p| {
        std::array::from_fn(|q| (basis.matrix(p + 1).transpose() * &c * basis.matrix(q + 1)).trace())
    })
}
