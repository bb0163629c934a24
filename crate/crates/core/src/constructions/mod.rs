//! Reduced designs on `t(t−1)` subjects built from orthogonal arrays of
//! triplets: the mod-`t` construction for odd `t`, its patch for even `t`,
//! and affine orbits over GF(t).

mod gf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use gf::{FieldElement, GaloisField, MAX_FIELD_ORDER};

use crate::design::{ExactDesign, TreatmentSequence};
use crate::error::{Error, Result};
use crate::symmetry::EquivalenceClass;

/// Three distinct treatment labels.
pub type Triplet = [usize; 3];

/// Default seed triplet for the field construction.
pub const DEFAULT_SEED: Triplet = [1, 2, 3];

/// `t(t−1)` triplets forming an orthogonal array of type I and strength two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartingDesign {
    pub t: usize,
    pub triplets: Vec<Triplet>,
}

impl StartingDesign {
    /// Whether every ordered pair of distinct labels appears exactly once in
    /// every ordered pair of positions.
    pub fn is_orthogonal_array(&self) -> bool {
        let t = self.t;
        if self.triplets.iter().any(|tr| tr.iter().any(|&u| u == 0 || u > t)) {
            return false;
        }
        for j1 in 0..3 {
            for j2 in 0..3 {
                if j1 == j2 {
                    continue;
                }
                let mut count = vec![0usize; t * t];
                for tr in &self.triplets {
                    count[(tr[j1] - 1) * t + tr[j2] - 1] += 1;
                }
                for u in 0..t {
                    for v in 0..t {
                        if count[u * t + v] != usize::from(u != v) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn sorted(t: usize, mut triplets: Vec<Triplet>) -> StartingDesign {
    triplets.sort_unstable();
    StartingDesign { t, triplets }
}

/// Triplets `[u, u+v, u+2v] mod t` for `u = 0..t−1`, `v = 1..t−1`, with
/// residue `r` written as label `r + 1`.
pub fn oa_triplets_odd(t: usize) -> Result<StartingDesign> {
    if t < 3 || t % 2 == 0 {
        return Err(Error::Unsupported(format!("the mod-t construction needs odd t >= 3, got {t}")));
    }
    let triplets =
        (0..t).flat_map(|u| (1..t).map(move |v| [u % t + 1, (u + v) % t + 1, (u + 2 * v) % t + 1])).collect();
    Ok(sorted(t, triplets))
}

/// The construction for `t − 1` with each triplet `[u, u+1, u+2]` replaced
/// by `[t, u+1, u+2]`, `[u, t, u+2]` and `[u, u+1, t]`.
pub fn oa_triplets_even(t: usize) -> Result<StartingDesign> {
    if t < 4 || t % 2 == 1 {
        return Err(Error::Unsupported(format!("the patched construction needs even t >= 4, got {t}")));
    }
    let m = t - 1;
    let base = oa_triplets_odd(m)?;
    let mut triplets = Vec::with_capacity(t * m);
    for tr in base.triplets {
        let [a, b, c] = tr;
        if b == a % m + 1 && c == b % m + 1 {
            triplets.extend([[t, b, c], [a, t, c], [a, b, t]]);
        } else {
            triplets.push(tr);
        }
    }
    Ok(sorted(t, triplets))
}

/// The odd or even mod-`t` construction, as appropriate.
pub fn oa_triplets(t: usize) -> Result<StartingDesign> {
    if t % 2 == 1 {
        oa_triplets_odd(t)
    } else {
        oa_triplets_even(t)
    }
}

/// All triplets `[ax+b, ay+b, az+b]` over GF(t) with `a ≠ 0`, where
/// `(x, y, z)` is the seed read through the field's label map.
pub fn gf_triplets(t: usize, seed: Triplet) -> Result<StartingDesign> {
    if !(4..=MAX_FIELD_ORDER).contains(&t) {
        return Err(Error::Unsupported(format!("the field construction needs 4 <= t <= {MAX_FIELD_ORDER}, got {t}")));
    }
    let f = GaloisField::new(t)?;
    check_distinct(&seed)?;
    let [x, y, z] = [f.element(seed[0])?, f.element(seed[1])?, f.element(seed[2])?];
    let mut triplets = Vec::with_capacity(t * (t - 1));
    for a in f.elements().filter(|&a| a != f.zero()) {
        for b in f.elements() {
            let img = |e| f.label(f.add(f.mul(a, e), b));
            triplets.push([img(x), img(y), img(z)]);
        }
    }
    Ok(sorted(t, triplets))
}

fn check_distinct(tr: &Triplet) -> Result<()> {
    if tr[0] == tr[1] || tr[0] == tr[2] || tr[1] == tr[2] {
        return Err(Error::Inconsistent(format!("triplet entries must be distinct, got {tr:?}")));
    }
    Ok(())
}

/// Replaces label `i` of a three-block pattern by the `i`-th triplet entry.
pub fn expand_triplet(tr: &Triplet, pattern: &EquivalenceClass, t: usize) -> Result<TreatmentSequence> {
    if pattern.block_count() != 3 {
        return Err(Error::Inconsistent(format!(
            "pattern {} has {} distinct labels, expected 3",
            pattern.canonical_string(),
            pattern.block_count()
        )));
    }
    check_distinct(tr)?;
    TreatmentSequence::new(pattern.labels().iter().map(|&l| tr[l - 1]).collect(), t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Mod-`t` triplets, patched for even `t`.
    Oa,
    /// Affine orbit of a seed triplet over GF(t).
    Gf,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oa => "oa",
            Method::Gf => "gf",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oa" => Ok(Method::Oa),
            "gf" => Ok(Method::Gf),
            other => Err(Error::Parse(format!("unknown construction method `{other}` (expected oa or gf)"))),
        }
    }
}

/// How a reduced design was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionInfo {
    pub method: Method,
    pub t: usize,
    pub pattern: EquivalenceClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Triplet>,
    /// Defining polynomial of the field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    /// `(label, field element)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_map: Option<Vec<(usize, String)>>,
}

/// A reduced design together with its construction record.
#[derive(Debug, Clone)]
pub struct ReducedDesign {
    pub design: ExactDesign,
    pub info: ConstructionInfo,
}

/// Expands every triplet of the chosen starting design with `pattern`,
/// giving `t(t−1)` subjects in lexicographic triplet order.
pub fn build_reduced_design(
    t: usize,
    pattern: &EquivalenceClass,
    method: Method,
    seed: Option<Triplet>,
) -> Result<ReducedDesign> {
    let (start, info) = match method {
        Method::Oa => {
            if seed.is_some() {
                return Err(Error::Inconsistent("a seed triplet applies only to the gf method".into()));
            }
            let start = oa_triplets(t)?;
            (
                start,
                ConstructionInfo { method, t, pattern: pattern.clone(), seed: None, polynomial: None, label_map: None },
            )
        }
        Method::Gf => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let start = gf_triplets(t, seed)?;
            let f = GaloisField::new(t)?;
            let mut label_map: Vec<(usize, String)> = f.elements().map(|e| (f.label(e), f.format(e))).collect();
            label_map.sort_unstable();
            let info = ConstructionInfo {
                method,
                t,
                pattern: pattern.clone(),
                seed: Some(seed),
                polynomial: Some(f.polynomial()),
                label_map: Some(label_map),
            };
            (start, info)
        }
    };
    let rows = start.triplets.iter().map(|tr| expand_triplet(tr, pattern, t)).collect::<Result<Vec<_>>>()?;
    Ok(ReducedDesign { design: ExactDesign::new(rows)?, info })
}
