//! Reference values and printed designs shared by the integration suites.

#![allow(dead_code)]

pub mod oracles;

use xover_core::scalar::rational;
use xover_core::{EquivalenceClass, ExactDesign, Rational};

/// A tabulated reference entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    /// A value printed to the shown precision.
    Val(f64),
    /// Strictly between 0 and 0.005.
    ZeroPlus,
    /// Strictly between 0.995 and 1.
    OneMinus,
    /// Not applicable: the class needs more treatments than available.
    Dash,
}

use Cell::{Dash, OneMinus, Val, ZeroPlus};

impl Cell {
    /// Whether `x` is consistent with the cell at rounding tolerance `tol`.
    /// A printed 0 or 1 for a proportion means the bound itself.
    #[allow(clippy::redundant_guards)]
    pub fn matches(&self, x: f64, tol: f64) -> bool {
        match *self {
            Val(v) if v == 0.0 => x.abs() <= 1e-9,
            Val(v) if v == 1.0 => (x - 1.0).abs() <= 1e-9,
            Val(v) => (x - v).abs() <= tol,
            ZeroPlus => x > 0.0 && x < 0.005 + 1e-12,
            OneMinus => x < 1.0 && x > 0.995 - 1e-12,
            Dash => false,
        }
    }
}

pub fn class(s: &str) -> EquivalenceClass {
    EquivalenceClass::parse(s).unwrap()
}

fn r(n: i64, d: i64) -> Rational {
    rational(n, d)
}

/// `(t, first proportion, second proportion, h*)`.
pub type ExactRow = (usize, Rational, Rational, Rational);

/// Three periods: `(t, π[112], π[122], h*)`.
pub fn k3_exact() -> Vec<ExactRow> {
    type Fraction = (i64, i64);
    let rows: [(usize, Fraction, Fraction, Fraction); 15] = [
        (2, (1, 2), (1, 2), (1, 3)),
        (3, (5, 13), (8, 13), (16, 39)),
        (4, (1, 3), (2, 3), (4, 9)),
        (5, (7, 23), (16, 23), (32, 69)),
        (6, (2, 7), (5, 7), (10, 21)),
        (7, (3, 11), (8, 11), (16, 33)),
        (8, (5, 19), (14, 19), (28, 57)),
        (9, (11, 43), (32, 43), (64, 129)),
        (10, (1, 4), (3, 4), (1, 2)),
        (11, (13, 53), (40, 53), (80, 159)),
        (12, (7, 29), (22, 29), (44, 87)),
        (13, (5, 21), (16, 21), (32, 63)),
        (14, (4, 17), (13, 17), (26, 51)),
        (15, (17, 73), (56, 73), (112, 219)),
        (16, (3, 13), (10, 13), (20, 39)),
    ];
    rows.iter().map(|&(t, a, b, h)| (t, r(a.0, a.1), r(b.0, b.1), r(h.0, h.1))).collect()
}

/// Three periods: efficiency of `[1 2 2]` for `t = 2..=16`.
pub const K3_EFF_122: [f64; 15] =
    [0.0, 0.61, 0.75, 0.81, 0.84, 0.86, 0.87, 0.88, 0.89, 0.89, 0.90, 0.90, 0.91, 0.91, 0.91];

pub const T_COLUMNS: [usize; 12] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30];

/// Five periods, exact columns `t = 2..=5`: `(t, π[11222], π[11122], h*)`.
pub fn k5_exact() -> Vec<ExactRow> {
    vec![
        (2, r(1, 2), r(1, 2), r(7, 5)),
        (3, r(7, 9), r(2, 9), r(68, 45)),
        (4, r(17, 19), r(2, 19), r(148, 95)),
        (5, r(47, 49), r(2, 49), r(388, 245)),
    ]
}

/// Five periods, rounded columns `t ∈ {6..=10, 15, 20, 30}`:
/// `(t, π[11222], π[11122], π[11233], h*)`.
pub const K5_ROUNDED: [(usize, f64, f64, f64, f64); 8] = [
    (6, 0.98, 0.0, 0.02, 1.60),
    (7, 0.98, 0.0, 0.02, 1.61),
    (8, 0.98, 0.0, 0.02, 1.62),
    (9, 0.98, 0.0, 0.02, 1.63),
    (10, 0.98, 0.0, 0.02, 1.63),
    (15, 0.97, 0.0, 0.03, 1.64),
    (20, 0.97, 0.0, 0.03, 1.65),
    (30, 0.97, 0.0, 0.03, 1.66),
];

/// Five periods, single-class efficiencies over [`T_COLUMNS`].
#[rustfmt::skip]
pub fn k5_efficiency() -> Vec<(&'static str, [Cell; 12])> {
    vec![
        ("11222", [Val(0.95), Val(0.99), Val(0.998), OneMinus, OneMinus, OneMinus, OneMinus, OneMinus, OneMinus, OneMinus, OneMinus, OneMinus]),
        ("11122", [Val(0.95), Val(0.91), Val(0.89), Val(0.88), Val(0.87), Val(0.87), Val(0.87), Val(0.87), Val(0.87), Val(0.86), Val(0.86), Val(0.85)]),
        ("11233", [Dash, Val(0.77), Val(0.82), Val(0.84), Val(0.85), Val(0.86), Val(0.86), Val(0.86), Val(0.86), Val(0.87), Val(0.88), Val(0.88)]),
    ]
}

/// Six periods over [`T_COLUMNS`]: `(π[111222], π[112233], h*)`.
pub const K6_TABLE: [(f64, f64, f64); 12] = [
    (1.0, 0.0, 2.0),
    (0.81, 0.19, 2.11),
    (0.66, 0.34, 2.16),
    (0.55, 0.45, 2.19),
    (0.48, 0.52, 2.21),
    (0.42, 0.58, 2.22),
    (0.38, 0.62, 2.23),
    (0.35, 0.65, 2.24),
    (0.32, 0.68, 2.25),
    (0.23, 0.77, 2.26),
    (0.19, 0.81, 2.27),
    (0.15, 0.85, 2.28),
];

/// Six periods, single-class efficiencies over [`T_COLUMNS`].
#[rustfmt::skip]
pub fn k6_efficiency() -> Vec<(&'static str, [Cell; 12])> {
    vec![
        ("111222", [Val(1.0), Val(0.99), Val(0.99), Val(0.98), Val(0.98), Val(0.97), Val(0.97), Val(0.97), Val(0.97), Val(0.97), Val(0.96), Val(0.96)]),
        ("112233", [Dash, Val(0.95), Val(0.97), Val(0.98), Val(0.99), Val(0.99), Val(0.99), Val(0.99), OneMinus, OneMinus, OneMinus, OneMinus]),
    ]
}

/// Seven periods for `t = 3..=7`: proportions of `[1112222]`, `[1112233]`,
/// `[1122333]` and `h*`.
pub fn k7_table() -> Vec<(usize, [Cell; 3], f64)> {
    vec![
        (3, [Val(0.57), Val(0.0), Val(0.43)], 2.60),
        (4, [Val(0.19), Val(0.0), Val(0.81)], 2.70),
        (5, [Val(0.0), Val(0.09), Val(0.91)], 2.76),
        (6, [Val(0.0), ZeroPlus, OneMinus], 2.80),
        (7, [Val(0.0), Val(0.0), Val(1.0)], 2.82),
    ]
}

pub const K7_CLASSES: [&str; 3] = ["1112222", "1112233", "1122333"];

/// Seven periods, single-class efficiencies for `t = 3..=7`.
pub fn k7_efficiency() -> Vec<(&'static str, [Cell; 5])> {
    vec![
        ("1112222", [Val(0.98), Val(0.96), Val(0.95), Val(0.94), Val(0.94)]),
        ("1112233", [Val(0.98), Val(0.99), Val(0.98), Val(0.98), Val(0.98)]),
        ("1122333", [Val(0.98), OneMinus, OneMinus, OneMinus, Val(1.0)]),
    ]
}

/// Reduced designs on `t(t−1)` subjects, `t = 4..=10`: `(A = D, E)`.
pub const REDUCED_K6: [(f64, f64); 7] =
    [(0.951, 0.951), (0.977, 0.977), (0.973, 0.951), (0.978, 0.978), (0.974, 0.950), (0.970, 0.950), (0.968, 0.949)];
pub const REDUCED_K7: [(f64, f64); 7] =
    [(0.974, 0.974), (0.990, 0.990), (0.982, 0.961), (0.983, 0.983), (0.978, 0.955), (0.973, 0.954), (0.971, 0.954)];

/// Field-built reduced designs: `(t, efficiency for [112233], for [1122333])`.
pub const REDUCED_GF: [(usize, f64, f64); 2] = [(8, 0.977, 0.981), (9, 0.950, 0.954)];

/// Three periods, four treatments, 36 subjects; one row per period.
pub const DESIGN_K3_T4: &str = r"
1 1 1 1 1 1 2 2 2 2 2 2 3 3 3 3 3 3 4 4 4 4 4 4 1 1 1 2 2 2 3 3 3 4 4 4
2 2 3 3 4 4 1 1 3 3 4 4 1 1 2 2 4 4 1 1 2 2 3 3 1 1 1 2 2 2 3 3 3 4 4 4
2 2 3 3 4 4 1 1 3 3 4 4 1 1 2 2 4 4 1 1 2 2 3 3 2 3 4 1 3 4 1 2 4 1 2 3
";
/// Five periods, three treatments, 54 subjects; one row per period.
pub const DESIGN_K5_T3: &str = r"
1 1 1 1 1 1 1 1 1 1 1 1 1 1 2 2 2 2 2 2 2 2 2 2 2 2 2 2 3 3 3 3 3 3 3 3 3 3 3 3 3 3 1 1 1 1 2 2 2 2 3 3 3 3
1 1 1 1 1 1 1 1 1 1 1 1 1 1 2 2 2 2 2 2 2 2 2 2 2 2 2 2 3 3 3 3 3 3 3 3 3 3 3 3 3 3 1 1 1 1 2 2 2 2 3 3 3 3
2 2 2 2 2 2 2 3 3 3 3 3 3 3 1 1 1 1 1 1 1 3 3 3 3 3 3 3 1 1 1 1 1 1 1 2 2 2 2 2 2 2 1 1 1 1 2 2 2 2 3 3 3 3
2 2 2 2 2 2 2 3 3 3 3 3 3 3 1 1 1 1 1 1 1 3 3 3 3 3 3 3 1 1 1 1 1 1 1 2 2 2 2 2 2 2 2 2 3 3 1 1 3 3 1 1 2 2
2 2 2 2 2 2 2 3 3 3 3 3 3 3 1 1 1 1 1 1 1 3 3 3 3 3 3 3 1 1 1 1 1 1 1 2 2 2 2 2 2 2 2 2 3 3 1 1 3 3 1 1 2 2
";
/// Starting triplets for `t = 5`; one row per position.
pub const START_T5: &str = r"
1 1 1 1 2 2 2 2 3 3 3 3 4 4 4 4 5 5 5 5
2 3 4 5 3 4 5 1 4 5 1 2 5 1 2 3 1 2 3 4
3 5 2 4 4 1 3 5 5 2 4 1 1 3 5 2 2 4 1 3
";
/// Seven periods, five treatments, 20 subjects; one row per period.
pub const DESIGN_K7_T5: &str = r"
1 1 1 1 2 2 2 2 3 3 3 3 4 4 4 4 5 5 5 5
1 1 1 1 2 2 2 2 3 3 3 3 4 4 4 4 5 5 5 5
2 3 4 5 3 4 5 1 4 5 1 2 5 1 2 3 1 2 3 4
2 3 4 5 3 4 5 1 4 5 1 2 5 1 2 3 1 2 3 4
3 5 2 4 4 1 3 5 5 2 4 1 1 3 5 2 2 4 1 3
3 5 2 4 4 1 3 5 5 2 4 1 1 3 5 2 2 4 1 3
3 5 2 4 4 1 3 5 5 2 4 1 1 3 5 2 2 4 1 3
";
/// Starting triplets for `t = 8`.
pub const START_T8: &str = r"
8 7 1 3 2 6 4 5 8 1 2 4 3 7 5 6 8 2 3 5 4 1 6 7 8 3 4 6 5 2 7 1 8 4 5 7 6 3 1 2 8 5 6 1 7 4 2 3 8 6 7 2 1 5 3 4
7 8 3 1 6 2 5 4 1 8 4 2 7 3 6 5 2 8 5 3 1 4 7 6 3 8 6 4 2 5 1 7 4 8 7 5 3 6 2 1 5 8 1 6 4 7 3 2 6 8 2 7 5 1 4 3
1 3 8 7 4 5 2 6 2 4 8 1 5 6 3 7 3 5 8 2 6 7 4 1 4 6 8 3 7 1 5 2 5 7 8 4 1 2 6 3 6 1 8 5 2 3 7 4 7 2 8 6 3 4 1 5
";
/// Starting triplets for `t = 9`.
pub const START_T9: &str = r"
1 1 2 2 3 3 4 4 5 5 6 6 7 7 8 8 9 9 1 1 4 4 7 7 2 2 5 5 8 8 3 3 6 6 9 9 1 1 5 5 9 9 2 2 6 6 7 7 3 3 4 4 8 8 1 1 6 6 8 8 2 2 4 4 9 9 3 3 5 5 7 7
2 3 1 3 1 2 5 6 4 6 4 5 8 9 7 9 7 8 4 7 1 7 1 4 5 8 2 8 2 5 6 9 3 9 3 6 5 9 1 9 1 5 6 7 2 7 2 6 4 8 3 8 3 4 6 8 1 8 1 6 4 9 2 9 2 4 5 7 3 7 3 5
3 2 3 1 2 1 6 5 6 4 5 4 9 8 9 7 8 7 7 4 7 1 4 1 8 5 8 2 5 2 9 6 9 3 6 3 9 5 9 1 5 1 7 6 7 2 6 2 8 4 8 3 4 3 8 6 8 1 6 1 9 4 9 2 4 2 7 5 7 3 5 3
";

/// Parses whitespace-separated rows, one per period, into subject rows.
pub fn columns(text: &str) -> Vec<Vec<usize>> {
    let rows: Vec<Vec<usize>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

pub fn design(text: &str, t: usize) -> ExactDesign {
    ExactDesign::from_rows(columns(text), t).unwrap()
}

pub fn triplets(text: &str) -> Vec<[usize; 3]> {
    columns(text).into_iter().map(|c| [c[0], c[1], c[2]]).collect()
}
