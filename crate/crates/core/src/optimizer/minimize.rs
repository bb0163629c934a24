//! Minimization of `h*(γ) = max_ℓ h_ℓ(γ)`.
//!
//! The problem is written in epigraph form, `min z` subject to
//! `h_ℓ(γ) ≤ z`, and solved by a log-barrier interior-point method. The
//! barrier solution is then refined by Newton's method on the KKT system of
//! the active pieces (equal values, stationary convex combination of
//! gradients), adjusting the active set until it is consistent.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symmetry::{CoefficientTable, GammaPoint};

/// Relative duality gap at which the barrier phase stops.
const BARRIER_GAP: f64 = 1e-10;
/// Factor applied to the barrier weight after each centering.
const BARRIER_GROWTH: f64 = 10.0;
/// Newton decrement threshold for one centering step.
const CENTERING_TOL: f64 = 1e-9;
/// Newton steps allowed per centering.
const CENTERING_STEPS: usize = 100;
/// Relative residual at which the KKT refinement stops.
const KKT_TOL: f64 = 1e-14;

/// A piece `h(y) = c + 2 b'y + y'A y` in reduced coordinates `γ = V y`.
#[derive(Debug, Clone)]
struct Piece {
    c: f64,
    b: DVector<f64>,
    a: DMatrix<f64>,
}

impl Piece {
    fn value(&self, y: &DVector<f64>) -> f64 {
        self.c + 2.0 * self.b.dot(y) + y.dot(&(&self.a * y))
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        (&self.a * y + &self.b) * 2.0
    }
}

/// Output of [`minimize_hstar`] with solver diagnostics.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub gamma: GammaPoint,
    pub h_star: f64,
    /// Newton iterations used (barrier plus refinement).
    pub iterations: usize,
    /// Whether the KKT refinement converged; otherwise the barrier point is returned.
    pub refined: bool,
}

/// Orthonormal basis of the directions along which at least one `h_ℓ` varies.
fn moving_directions(tables: &[CoefficientTable]) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(5, 5);
    for tbl in tables {
        let ata = tbl.quadratic().transpose() * tbl.quadratic();
        let b = tbl.linear();
        m += DMatrix::from_fn(5, 5, |i, j| ata[(i, j)] + b[i] * b[j]);
    }
    let eig = m.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..5)
        .filter(|&i| eig.eigenvalues[i] > 1e-12 * lmax.max(1.0))
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(5, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn reduce(tables: &[CoefficientTable], v: &DMatrix<f64>) -> Vec<Piece> {
    tables
        .iter()
        .map(|tbl| {
            let a5 = DMatrix::from_fn(5, 5, |i, j| tbl.quadratic()[(i, j)]);
            let b5 = DVector::from_fn(5, |i, _| tbl.linear()[i]);
            Piece { c: tbl.constant(), b: v.transpose() * b5, a: v.transpose() * a5 * v }
        })
        .collect()
}

fn max_value(pieces: &[Piece], y: &DVector<f64>) -> f64 {
    pieces.iter().map(|p| p.value(y)).fold(f64::NEG_INFINITY, f64::max)
}

/// Solves a symmetric system, regularizing if the matrix is not positive definite.
fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = h.nrows();
    let scale = h.diagonal().iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    loop {
        let m = h + DMatrix::identity(n, n) * shift;
        if let Some(ch) = m.cholesky() {
            return ch.solve(g);
        }
        shift = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
    }
}

struct Barrier<'a> {
    pieces: &'a [Piece],
    tau: f64,
}

impl Barrier<'_> {
    fn value(&self, y: &DVector<f64>, z: f64) -> Option<f64> {
        let mut f = self.tau * z;
        for p in self.pieces {
            let s = z - p.value(y);
            if s <= 0.0 {
                return None;
            }
            f -= s.ln();
        }
        Some(f)
    }

    /// Gradient and Hessian in `(y, z)`.
    fn derivatives(&self, y: &DVector<f64>, z: f64) -> (DVector<f64>, DMatrix<f64>) {
        let r = y.len();
        let mut g = DVector::zeros(r + 1);
        let mut h = DMatrix::zeros(r + 1, r + 1);
        g[r] = self.tau;
        for p in self.pieces {
            let s = z - p.value(y);
            let grad = p.gradient(y);
            let inv = 1.0 / s;
            let inv2 = inv * inv;
            for i in 0..r {
                g[i] += grad[i] * inv;
                for j in 0..r {
                    h[(i, j)] += grad[i] * grad[j] * inv2 + 2.0 * p.a[(i, j)] * inv;
                }
                h[(i, r)] -= grad[i] * inv2;
                h[(r, i)] -= grad[i] * inv2;
            }
            g[r] -= inv;
            h[(r, r)] += inv2;
        }
        (g, h)
    }
}

/// Runs the barrier method; returns `(y, z, tau, iterations)`.
fn barrier_phase(pieces: &[Piece], r: usize, max_iterations: usize) -> Result<(DVector<f64>, f64, f64, usize)> {
    let n = pieces.len() as f64;
    let mut y = DVector::zeros(r);
    let h0 = max_value(pieces, &y);
    let mut z = h0 + h0.abs().max(1.0);
    let mut tau = n / h0.abs().max(1.0);
    let mut iterations = 0;
    loop {
        let bar = Barrier { pieces, tau };
        for _ in 0..CENTERING_STEPS {
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NoConvergence {
                    iterations,
                    detail: format!("barrier phase stalled at z = {z}, weight = {tau}"),
                });
            }
            let (g, h) = bar.derivatives(&y, z);
            let step = -solve_spd(&h, &g);
            let decrement = -g.dot(&step);
            if decrement / 2.0 <= CENTERING_TOL {
                break;
            }
            let f0 = bar.value(&y, z).expect("iterate is strictly feasible");
            let mut alpha = 1.0;
            let accepted = loop {
                let yn = &y + step.rows(0, r) * alpha;
                let zn = z + step[r] * alpha;
                if let Some(f) = bar.value(&yn, zn) {
                    if f < f0 && f <= f0 - 0.25 * alpha * decrement {
                        break Some((yn, zn));
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-20 {
                    break None;
                }
            };
            match accepted {
                Some((yn, zn)) => {
                    y = yn;
                    z = zn;
                }
                None => break,
            }
        }
        if n / tau <= BARRIER_GAP * z.abs().max(1.0) {
            return Ok((y, z, tau, iterations));
        }
        tau *= BARRIER_GROWTH;
    }
}

/// Newton's method on the KKT system of the pieces in `active`, starting
/// from `(y, z, π)`. Steps are minimum-norm least-squares solutions so that
/// degenerate systems are handled. Returns the refined point or `None`.
fn kkt_newton(
    pieces: &[Piece],
    active: &[usize],
    y0: &DVector<f64>,
    z0: f64,
    pi0: &[f64],
) -> Option<(DVector<f64>, f64, Vec<f64>, usize)> {
    let r = y0.len();
    let m = active.len();
    let dim = r + 1 + m;
    let neq = m + r + 1;
    let (mut y, mut z, mut pi) = (y0.clone(), z0, pi0.to_vec());
    let scale = z0.abs().max(1.0);
    let residual = |y: &DVector<f64>, z: f64, pi: &[f64]| {
        let mut f = DVector::zeros(neq);
        let mut stat = DVector::zeros(r);
        for (i, &l) in active.iter().enumerate() {
            f[i] = pieces[l].value(y) - z;
            stat += pieces[l].gradient(y) * pi[i];
        }
        f.rows_mut(m, r).copy_from(&stat);
        f[m + r] = pi.iter().sum::<f64>() - 1.0;
        f
    };
    let mut f = residual(&y, z, &pi);
    for it in 0..60 {
        if f.amax() <= KKT_TOL * scale {
            return Some((y, z, pi, it));
        }
        let mut jac = DMatrix::zeros(neq, dim);
        let mut hess = DMatrix::zeros(r, r);
        for (i, &l) in active.iter().enumerate() {
            let grad = pieces[l].gradient(&y);
            for j in 0..r {
                jac[(i, j)] = grad[j];
                jac[(m + j, r + 1 + i)] = grad[j];
            }
            jac[(i, r)] = -1.0;
            jac[(m + r, r + 1 + i)] = 1.0;
            hess += &pieces[l].a * (2.0 * pi[i]);
        }
        jac.view_mut((m, 0), (r, r)).copy_from(&hess);
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let step = svd.solve(&(-&f), 1e-13 * smax.max(1.0)).ok()?;
        // damped step on the residual norm
        let mut alpha = 1.0;
        let norm0 = f.norm();
        loop {
            let yn = &y + step.rows(0, r) * alpha;
            let zn = z + step[r] * alpha;
            let pin: Vec<f64> = pi.iter().enumerate().map(|(i, p)| p + step[r + 1 + i] * alpha).collect();
            let fn_ = residual(&yn, zn, &pin);
            if fn_.norm() < norm0 || alpha < 1e-6 {
                y = yn;
                z = zn;
                pi = pin;
                f = fn_;
                break;
            }
            alpha *= 0.5;
        }
    }
    (f.amax() <= 1e3 * KKT_TOL * scale).then_some((y, z, pi, 60))
}

/// Refines the barrier point by active-set KKT Newton.
fn refine(pieces: &[Piece], y: &DVector<f64>, z: f64, tau: f64) -> Option<(DVector<f64>, usize)> {
    let scale = z.abs().max(1.0);
    let slack: Vec<f64> = pieces.iter().map(|p| z - p.value(y)).collect();
    let duals: Vec<f64> = slack.iter().map(|s| 1.0 / (tau * s)).collect();
    let mut active: Vec<usize> = (0..pieces.len()).filter(|&l| duals[l] > 1e-6 || slack[l] < 1e-6 * scale).collect();
    let total: f64 = active.iter().map(|&l| duals[l]).sum();
    let mut pi: Vec<f64> = active.iter().map(|&l| duals[l] / total).collect();
    let (mut y, mut z) = (y.clone(), z);
    let mut iterations = 0;
    for _ in 0..(2 * pieces.len() + 10) {
        let (yn, zn, pin, its) = kkt_newton(pieces, &active, &y, z, &pi)?;
        iterations += its;
        // drop the most negative multiplier
        let (imin, &pmin) = pin.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("active set is nonempty");
        if pmin < -1e-12 {
            active.remove(imin);
            pi = pin;
            pi.remove(imin);
            let s: f64 = pi.iter().map(|p| p.max(0.0)).sum();
            pi.iter_mut().for_each(|p| *p = p.max(0.0) / s);
            continue;
        }
        // add the most violated outside piece
        let violator = (0..pieces.len())
            .filter(|l| !active.contains(l))
            .map(|l| (l, pieces[l].value(&yn) - zn))
            .filter(|&(_, gap)| gap > 1e-13 * scale)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match violator {
            Some((l, _)) => {
                let pos = active.partition_point(|&a| a < l);
                active.insert(pos, l);
                pi = pin;
                pi.insert(pos, 0.0);
                y = yn;
                z = zn;
            }
            None => return Some((yn, iterations)),
        }
    }
    None
}

/// Step 1: a minimizer `γ*` of `h*(γ)` and the value `h* = h*(γ*)`.
pub fn minimize_hstar(tables: &[CoefficientTable], max_iterations: usize) -> Result<MinimizeOutcome> {
    let t = tables.first().ok_or(Error::EmptyDesign)?.t;
    if tables.iter().any(|tbl| tbl.t != t) {
        return Err(Error::Inconsistent("coefficient tables disagree on t".into()));
    }
    let v = moving_directions(tables);
    let pieces = reduce(tables, &v);
    let r = v.ncols();
    let (y_bar, z, tau, mut iterations) = barrier_phase(&pieces, r, max_iterations)?;
    let (y, refined) = match refine(&pieces, &y_bar, z, tau) {
        Some((y, its)) if max_value(&pieces, &y) <= max_value(&pieces, &y_bar) + 1e-9 * z.abs().max(1.0) => {
            iterations += its;
            (y, true)
        }
        _ => (y_bar, false),
    };
    let g = &v * &y;
    let gamma = GammaPoint([g[0], g[1], g[2], g[3], g[4]]);
    let h_star = hstar_at(tables, &gamma);
    Ok(MinimizeOutcome { gamma, h_star, iterations, refined })
}

/// `h*(γ) = max_ℓ h_ℓ(γ)`.
pub fn hstar_at(tables: &[CoefficientTable], gamma: &GammaPoint) -> f64 {
    tables.iter().map(|tbl| tbl.h_value(gamma)).fold(f64::NEG_INFINITY, f64::max)
}
