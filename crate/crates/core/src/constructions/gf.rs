//! Arithmetic in the finite fields GF(p^n) of order at most 32.

use crate::error::{Error, Result};

/// Largest field order supported.
pub const MAX_FIELD_ORDER: usize = 32;

/// Monic irreducible polynomials for the composite prime powers up to 32,
/// as `(order, p, coefficients from x^0 up to the leading 1)`.
const IRREDUCIBLES: &[(usize, usize, &[usize])] = &[
    (4, 2, &[1, 1, 1]),
    (8, 2, &[1, 1, 0, 1]),
    (9, 3, &[1, 0, 1]),
    (16, 2, &[1, 1, 0, 0, 1]),
    (25, 5, &[2, 0, 1]),
    (27, 3, &[1, 2, 0, 1]),
    (32, 2, &[1, 0, 1, 0, 0, 1]),
];

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// An element of a [`GaloisField`], encoded as `Σ c_i p^i` for the
/// polynomial `Σ c_i x^i` of degree below `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub usize);

/// GF(q) with `q = p^n`, elements represented as polynomials over GF(p)
/// reduced modulo a fixed irreducible polynomial.
#[derive(Debug, Clone)]
pub struct GaloisField {
    q: usize,
    p: usize,
    n: usize,
    modulus: Vec<usize>,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl GaloisField {
    /// The field of order `q`, for prime powers `2 ≤ q ≤ 32`.
    pub fn new(q: usize) -> Result<Self> {
        let (p, modulus) = if is_prime(q) {
            (q, vec![0, 1])
        } else if let Some(&(_, p, m)) = IRREDUCIBLES.iter().find(|(o, _, _)| *o == q) {
            (p, m.to_vec())
        } else {
            return Err(Error::Unsupported(format!("no finite field of order {q} is available")));
        };
        let n = modulus.len() - 1;
        let digits = |e: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(n);
            let mut e = e;
            for _ in 0..n {
                v.push(e % p);
                e /= p;
            }
            v
        };
        let encode = |v: &[usize]| v.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum);
                let mut prod = vec![0; 2 * n];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (n..2 * n).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        for (i, m) in modulus.iter().enumerate() {
                            let idx = deg - n + i;
                            prod[idx] = (prod[idx] + p * p - c * m % p) % p;
                        }
                    }
                }
                mul[a * q + b] = encode(&prod[..n]);
            }
        }
        Ok(Self { q, p, n, modulus, add, mul })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// All elements in ascending encoding.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[a.0 * self.order() + b.0])
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.0 * self.order() + b.0])
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.elements().find(|&b| self.add(a, b) == self.zero()).expect("additive inverse exists")
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        self.elements().find(|&b| self.mul(a, b) == self.one())
    }

    /// The defining polynomial, e.g. `x^3 + x + 1`; `x` for prime fields.
    pub fn polynomial(&self) -> String {
        let terms: Vec<String> = self
            .modulus
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
                match i {
                    0 => coef,
                    1 => format!("{coef}x"),
                    _ => format!("{coef}x^{i}"),
                }
            })
            .collect();
        terms.join(" + ")
    }

    /// Polynomial form of an element, e.g. `x^2 + 1`.
    pub fn format(&self, a: FieldElement) -> String {
        if a.0 == 0 {
            return "0".into();
        }
        let mut e = a.0;
        let mut terms = Vec::new();
        for i in 0..self.n {
            let c = e % self.p;
            e /= self.p;
            if c != 0 {
                let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
                terms.push(match i {
                    0 => coef,
                    1 => format!("{coef}x"),
                    _ => format!("{coef}x^{i}"),
                });
            }
        }
        terms.reverse();
        terms.join(" + ")
    }

    /// Treatment label of an element: nonzero elements in ascending
    /// encoding take labels `1..q−1`, zero takes label `q`.
    pub fn label(&self, a: FieldElement) -> usize {
        if a.0 == 0 {
            self.order()
        } else {
            a.0
        }
    }

    /// Inverse of [`GaloisField::label`].
    pub fn element(&self, label: usize) -> Result<FieldElement> {
        let q = self.order();
        match label {
            l if l == q => Ok(FieldElement(0)),
            l if (1..q).contains(&l) => Ok(FieldElement(l)),
            l => Err(Error::LabelOutOfRange { label: l, t: q }),
        }
    }
}
