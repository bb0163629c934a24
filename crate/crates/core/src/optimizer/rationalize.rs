//! Exact rational recovery and verification of maximin solutions.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};
use crate::symmetry::CoefficientTable;

/// Largest denominator tried when recovering rationals.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Relative distance within which a convergent is accepted.
const MATCH_TOL: f64 = 1e-9;

/// The simplest continued-fraction convergent of `x` with denominator at
/// most `max_den` that lies within `1e-9·max(1, |x|)` of `x`.
pub fn continued_fraction(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let tol = MATCH_TOL * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some(Rational::new(BigInt::from(h2), BigInt::from(k2)));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rem - a;
        if frac == 0.0 {
            return None;
        }
        rem = 1.0 / frac;
    }
    None
}

/// Exact `(γ*, h*, π*)` for the active classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub gamma_star: [Rational; 5],
    pub h_star: Rational,
    /// Aligned with the active classes of the numeric solution.
    pub proportions: Vec<Rational>,
    /// Whether every exact check passed.
    pub verified: bool,
}

/// Solves `A x = b` exactly; free variables take the values in `fallback`.
/// Returns `None` when the system is inconsistent.
#[allow(clippy::needless_range_loop)]
fn solve_exact(a: &[[Rational; 5]; 5], b: &[Rational; 5], fallback: &[Rational; 5]) -> Option<[Rational; 5]> {
    let n = 5;
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = a[i].to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = Rational::one() / m[row][col].clone();
        for c in col..=n {
            m[row][c] = m[row][c].clone() * inv.clone();
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = m[row][c].clone() * f.clone();
                    m[r][c] = m[r][c].clone() - v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = fallback.clone();
    for (r, &pc) in pivots.iter().enumerate() {
        let mut v = m[r][n].clone();
        for c in 0..n {
            if c != pc && !pivots.contains(&c) {
                v -= m[r][c].clone() * x[c].clone();
            }
        }
        x[pc] = v;
    }
    Some(x)
}

fn h_gradient_exact(tbl: &CoefficientTable<Rational>, gamma: &[Rational; 5]) -> [Rational; 5] {
    std::array::from_fn(|p| {
        let mut acc = tbl.c[p + 1][0].clone();
        for (q, g) in gamma.iter().enumerate() {
            acc += tbl.c[p + 1][q + 1].clone() * g.clone();
        }
        acc * Rational::from_int(2)
    })
}

/// Rounds the proportions to small-denominator rationals, solves the
/// stationarity system exactly for `γ*`, and verifies equal values on the
/// classes with positive weight, dominance over all classes, exact
/// stationarity and `Σπ = 1`. `active` indexes `tables`.
pub fn rationalize(
    tables: &[CoefficientTable<Rational>],
    active: &[(usize, f64)],
    gamma: &[f64; 5],
    h_star: f64,
) -> Option<ExactSolution> {
    let proportions: Vec<Rational> = active
        .iter()
        .map(|&(_, p)| if p.abs() < 1e-12 { Some(Rational::zero()) } else { continued_fraction(p, MAX_DENOMINATOR) })
        .collect::<Option<_>>()?;
    let zero = Rational::zero;
    let mut a: [[Rational; 5]; 5] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
    let mut b: [Rational; 5] = std::array::from_fn(|_| zero());
    for (&(l, _), p) in active.iter().zip(&proportions) {
        let c = &tables[l].c;
        for i in 0..5 {
            b[i] = b[i].clone() - p.clone() * c[i + 1][0].clone();
            for j in 0..5 {
                a[i][j] = a[i][j].clone() + p.clone() * c[i + 1][j + 1].clone();
            }
        }
    }
    let fallback: [Rational; 5] =
        std::array::from_fn(|i| continued_fraction(gamma[i], MAX_DENOMINATOR).unwrap_or_else(zero));
    let gamma_star = solve_exact(&a, &b, &fallback)?;

    let positive: Vec<usize> =
        active.iter().zip(&proportions).filter(|(_, p)| p.is_positive()).map(|(&(l, _), _)| l).collect();
    let h_exact = tables[*positive.first()?].h_exact(&gamma_star);

    let sum_ok = proportions.iter().fold(Rational::zero(), |s, p| s + p.clone()) == Rational::one();
    let nonneg = proportions.iter().all(|p| !p.is_negative());
    let equal_ok = positive.iter().all(|&l| tables[l].h_exact(&gamma_star) == h_exact);
    let dominance_ok = tables.iter().all(|tbl| tbl.h_exact(&gamma_star) <= h_exact);
    let stationary = {
        let mut s: [Rational; 5] = std::array::from_fn(|_| zero());
        for (&(l, _), p) in active.iter().zip(&proportions) {
            let g = h_gradient_exact(&tables[l], &gamma_star);
            for i in 0..5 {
                s[i] = s[i].clone() + p.clone() * g[i].clone();
            }
        }
        s.iter().all(|v| v.is_zero())
    };
    let close = (Scalar::to_f64(&h_exact) - h_star).abs() <= 1e-8 * h_star.abs().max(1.0);
    let verified = sum_ok && nonneg && equal_ok && dominance_ok && stationary && close;
    Some(ExactSolution { gamma_star, h_star: h_exact, proportions, verified })
}
