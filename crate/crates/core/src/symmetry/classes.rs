//! Equivalence classes of sequences under relabelling of treatments,
//! encoded as restricted growth strings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::design::{parse_labels, TreatmentSequence};
use crate::error::{Error, Result};

/// A class of sequences that differ only by a relabelling of treatments,
/// stored in restricted-growth form: the first label is 1 and every label is
/// at most one more than the largest label before it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EquivalenceClass {
    labels: Vec<usize>,
    blocks: usize,
}

impl EquivalenceClass {
    /// Validates a restricted growth string.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::TooFewPeriods(labels.len()));
        }
        let mut max = 0;
        for &u in &labels {
            if u == 0 || u > max + 1 {
                return Err(Error::Parse(format!("{labels:?} is not a restricted growth string")));
            }
            max = max.max(u);
        }
        Ok(Self { labels, blocks: max })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_labels(s)?)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of periods.
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct labels `m`.
    pub fn block_count(&self) -> usize {
        self.blocks
    }

    /// Whether every label occupies a single run of consecutive periods
    /// (the class is a composition of `k`).
    pub fn is_run_form(&self) -> bool {
        self.labels.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }

    /// The canonical representative as a sequence on `t` treatments.
    pub fn representative(&self, t: usize) -> Result<TreatmentSequence> {
        if self.blocks > t {
            return Err(Error::TooManyBlocks { blocks: self.blocks, t });
        }
        TreatmentSequence::new(self.labels.clone(), t)
    }

    /// Digit string when every label is a single digit, comma-separated otherwise.
    pub fn canonical_string(&self) -> String {
        crate::design::format_labels(&self.labels, self.blocks)
    }
}

impl fmt::Display for EquivalenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.labels.iter().map(|u| u.to_string()).collect();
        write!(f, "[{}]", body.join(" "))
    }
}

impl TryFrom<String> for EquivalenceClass {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<EquivalenceClass> for String {
    fn from(c: EquivalenceClass) -> String {
        c.canonical_string()
    }
}

/// Relabels `s` so that labels appear in first-occurrence order 1, 2, ….
pub fn canonicalize(s: &TreatmentSequence) -> EquivalenceClass {
    canonicalize_labels(s.entries())
}

fn canonicalize_labels(entries: &[usize]) -> EquivalenceClass {
    let mut map = std::collections::HashMap::new();
    let mut labels = Vec::with_capacity(entries.len());
    for &u in entries {
        let next = map.len() + 1;
        labels.push(*map.entry(u).or_insert(next));
    }
    let blocks = map.len();
    EquivalenceClass { labels, blocks }
}

/// All classes of length `k` with at most `t` distinct labels, in
/// lexicographic order.
pub fn enumerate_classes(k: usize, t: usize) -> Result<Vec<EquivalenceClass>> {
    if k < 2 {
        return Err(Error::TooFewPeriods(k));
    }
    if t < 2 {
        return Err(Error::TooFewTreatments { t, min: 2 });
    }
    let mut out = Vec::new();
    let mut labels = vec![1usize; k];
    // prefix_max[j] = max(labels[0..=j])
    let mut prefix_max = vec![1usize; k];
    loop {
        out.push(EquivalenceClass { labels: labels.clone(), blocks: prefix_max[k - 1] });
        // rightmost position that can still grow
        let mut j = k - 1;
        loop {
            if j == 0 {
                return Ok(out);
            }
            let cap = (prefix_max[j - 1] + 1).min(t);
            if labels[j] < cap {
                break;
            }
            j -= 1;
        }
        labels[j] += 1;
        prefix_max[j] = prefix_max[j - 1].max(labels[j]);
        for i in (j + 1)..k {
            labels[i] = 1;
            prefix_max[i] = prefix_max[j];
        }
    }
}

/// Stirling number of the second kind `S(n, m)`.
pub fn stirling2(n: usize, m: usize) -> u128 {
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=m.min(i)).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[m]
}

/// `Σ_{m=1}^{min(k,t)} S(k, m)`: the number of classes for `k` periods and `t` treatments.
pub fn class_count(k: usize, t: usize) -> u128 {
    (1..=k.min(t)).map(|m| stirling2(k, m)).sum()
}
