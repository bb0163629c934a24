//! Treatment sequences, exact designs and approximate designs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Tolerance on the sum of approximate-design proportions.
pub const PROPORTION_SUM_TOL: f64 = 1e-12;

/// The treatments one subject receives over `k ≥ 2` periods, labels in `1..=t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreatmentSequence {
    entries: Vec<usize>,
    t: usize,
}

impl TreatmentSequence {
    pub fn new(entries: Vec<usize>, t: usize) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::TooFewPeriods(entries.len()));
        }
        if let Some(&label) = entries.iter().find(|&&u| u == 0 || u > t) {
            return Err(Error::LabelOutOfRange { label, t });
        }
        Ok(Self { entries, t })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Number of periods.
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// Number of treatments.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Treatment in period `j` (zero-based), with the fictitious label 0
    /// before the first period: `pred(0) = 0`.
    #[inline]
    pub fn predecessor(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.entries[j - 1]
        }
    }

    /// Number of distinct labels used.
    pub fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.t + 1];
        self.entries.iter().filter(|&&u| !std::mem::replace(&mut seen[u], true)).count()
    }

    /// The sequence relabelled by `σ`.
    pub fn relabel(&self, sigma: &Permutation) -> Self {
        debug_assert_eq!(sigma.degree(), self.t);
        Self { entries: self.entries.iter().map(|&u| sigma.apply(u)).collect(), t: self.t }
    }

    /// Canonical string: a digit string when `t ≤ 9`, comma-separated labels otherwise.
    pub fn canonical_string(&self) -> String {
        format_labels(&self.entries, self.t)
    }

    /// Parses the canonical string form.
    pub fn parse(s: &str, t: usize) -> Result<Self> {
        Self::new(parse_labels(s)?, t)
    }
}

impl fmt::Display for TreatmentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, u) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn format_labels(entries: &[usize], t: usize) -> String {
    if t <= 9 {
        entries.iter().map(|u| char::from(b'0' + *u as u8)).collect()
    } else {
        entries.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Parses a label string: comma- or whitespace-separated labels, or a bare
/// digit string.
pub(crate) fn parse_labels(s: &str) -> Result<Vec<usize>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    let bad = || Error::Parse(format!("invalid treatment sequence `{s}`"));
    if s.contains(|c: char| c == ',' || c.is_whitespace()) {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    }
}

/// An exact design: one treatment sequence per subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDesign {
    rows: Vec<TreatmentSequence>,
    k: usize,
    t: usize,
}

impl ExactDesign {
    pub fn new(rows: Vec<TreatmentSequence>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDesign)?;
        let (k, t) = (first.k(), first.t());
        if let Some(bad) = rows.iter().find(|r| r.k() != k || r.t() != t) {
            return Err(Error::Inconsistent(format!(
                "subject {bad} has k={}, t={} but the design has k={k}, t={t}",
                bad.k(),
                bad.t()
            )));
        }
        Ok(Self { rows, k, t })
    }

    /// Builds a design from raw label rows (one per subject).
    pub fn from_rows(rows: Vec<Vec<usize>>, t: usize) -> Result<Self> {
        let rows = rows.into_iter().map(|r| TreatmentSequence::new(r, t)).collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn rows(&self) -> &[TreatmentSequence] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `d(i, j)`, zero-based subject and period.
    pub fn treatment(&self, subject: usize, period: usize) -> usize {
        self.rows[subject].entries[period]
    }

    pub fn relabel(&self, sigma: &Permutation) -> Self {
        Self { rows: self.rows.iter().map(|r| r.relabel(sigma)).collect(), k: self.k, t: self.t }
    }

    /// Rows sorted lexicographically; two designs are equal up to a subject
    /// permutation iff their sorted rows coincide.
    pub fn sorted_rows(&self) -> Vec<TreatmentSequence> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    pub fn same_up_to_subject_order(&self, other: &Self) -> bool {
        self.k == other.k && self.t == other.t && self.sorted_rows() == other.sorted_rows()
    }

    /// Proportions of each distinct sequence, with nominal size `n`.
    pub fn to_approximate(&self) -> ApproximateDesign {
        let mut counts: BTreeMap<TreatmentSequence, usize> = BTreeMap::new();
        for r in &self.rows {
            *counts.entry(r.clone()).or_default() += 1;
        }
        let n = self.n() as f64;
        ApproximateDesign {
            proportions: counts.into_iter().map(|(s, c)| (s, c as f64 / n)).collect(),
            k: self.k,
            t: self.t,
            nominal_n: n,
        }
    }
}

/// Proportions over treatment sequences, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateDesign {
    proportions: BTreeMap<TreatmentSequence, f64>,
    k: usize,
    t: usize,
    nominal_n: f64,
}

impl ApproximateDesign {
    /// Validates and builds an approximate design with nominal size 1.
    /// Zero proportions are dropped.
    pub fn new(proportions: impl IntoIterator<Item = (TreatmentSequence, f64)>) -> Result<Self> {
        let mut map: BTreeMap<TreatmentSequence, f64> = BTreeMap::new();
        for (s, p) in proportions {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProportions(format!("{s} has proportion {p}")));
            }
            *map.entry(s).or_default() += p;
        }
        map.retain(|_, p| *p > 0.0);
        let (k, t) = match map.keys().next() {
            Some(s) => (s.k(), s.t()),
            None => return Err(Error::EmptyDesign),
        };
        if map.keys().any(|s| s.k() != k || s.t() != t) {
            return Err(Error::Inconsistent("sequences disagree on k or t".into()));
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > PROPORTION_SUM_TOL {
            return Err(Error::InvalidProportions(format!("proportions sum to {total}, not 1")));
        }
        Ok(Self { proportions: map, k, t, nominal_n: 1.0 })
    }

    /// Nominal number of subjects used to scale information matrices.
    pub fn with_nominal_n(mut self, n: f64) -> Self {
        self.nominal_n = n;
        self
    }

    pub fn nominal_n(&self) -> f64 {
        self.nominal_n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Sequences with positive proportion, in canonical (lexicographic) order.
    pub fn proportions(&self) -> &BTreeMap<TreatmentSequence, f64> {
        &self.proportions
    }

    pub fn proportion(&self, s: &TreatmentSequence) -> f64 {
        self.proportions.get(s).copied().unwrap_or(0.0)
    }

    pub fn relabel(&self, sigma: &Permutation) -> Self {
        Self {
            proportions: self.proportions.iter().map(|(s, &p)| (s.relabel(sigma), p)).collect(),
            k: self.k,
            t: self.t,
            nominal_n: self.nominal_n,
        }
    }

    /// Largest absolute difference in proportions against another design.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let mut keys: Vec<&TreatmentSequence> = self.proportions.keys().collect();
        keys.extend(other.proportions.keys());
        keys.into_iter().map(|s| (self.proportion(s) - other.proportion(s)).abs()).fold(0.0, f64::max)
    }
}

/// Either kind of design, for routines that accept both.
#[derive(Debug, Clone, Copy)]
pub enum DesignRef<'a> {
    Exact(&'a ExactDesign),
    Approximate(&'a ApproximateDesign),
}

impl<'a> From<&'a ExactDesign> for DesignRef<'a> {
    fn from(d: &'a ExactDesign) -> Self {
        DesignRef::Exact(d)
    }
}

impl<'a> From<&'a ApproximateDesign> for DesignRef<'a> {
    fn from(d: &'a ApproximateDesign) -> Self {
        DesignRef::Approximate(d)
    }
}

impl DesignRef<'_> {
    pub fn k(&self) -> usize {
        match self {
            DesignRef::Exact(d) => d.k(),
            DesignRef::Approximate(d) => d.k(),
        }
    }

    pub fn t(&self) -> usize {
        match self {
            DesignRef::Exact(d) => d.t(),
            DesignRef::Approximate(d) => d.t(),
        }
    }

    /// `(sequence, weight)` pairs whose weights sum to `n`: every subject
    /// with weight 1 for exact designs, `n·π(s)` for approximate ones.
    /// Sequences come out in a fixed order so that sums are reproducible.
    pub fn weighted_sequences(&self) -> Vec<(&TreatmentSequence, f64)> {
        match self {
            DesignRef::Exact(d) => d.rows().iter().map(|s| (s, 1.0)).collect(),
            DesignRef::Approximate(d) => d.proportions().iter().map(|(s, &p)| (s, p * d.nominal_n())).collect(),
        }
    }

    /// Total weight `n`.
    pub fn size(&self) -> f64 {
        match self {
            DesignRef::Exact(d) => d.n() as f64,
            DesignRef::Approximate(d) => d.nominal_n(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_validation() {
        assert!(matches!(TreatmentSequence::new(vec![1], 2), Err(Error::TooFewPeriods(1))));
        assert!(matches!(TreatmentSequence::new(vec![1, 3], 2), Err(Error::LabelOutOfRange { label: 3, t: 2 })));
        assert!(matches!(TreatmentSequence::new(vec![0, 1], 2), Err(Error::LabelOutOfRange { label: 0, .. })));
        let s = TreatmentSequence::new(vec![1, 2, 2], 3).unwrap();
        assert_eq!(s.predecessor(0), 0);
        assert_eq!(s.predecessor(2), 2);
        assert_eq!(s.distinct_labels(), 2);
    }

    #[test]
    fn canonical_strings() {
        let s = TreatmentSequence::new(vec![1, 1, 2], 9).unwrap();
        assert_eq!(s.canonical_string(), "112");
        assert_eq!(TreatmentSequence::parse("112", 9).unwrap(), s);
        let s = TreatmentSequence::new(vec![10, 1, 2], 12).unwrap();
        assert_eq!(s.canonical_string(), "10,1,2");
        assert_eq!(TreatmentSequence::parse("10,1,2", 12).unwrap(), s);
        assert_eq!(TreatmentSequence::parse("[1 1 2]", 3).unwrap().entries(), &[1, 1, 2]);
        assert!(TreatmentSequence::parse("1a2", 3).is_err());
    }

    #[test]
    fn exact_design_rejects_mixed_shapes() {
        let err = ExactDesign::from_rows(vec![vec![1, 2], vec![1, 2, 1]], 2);
        assert!(matches!(err, Err(Error::Inconsistent(_))));
        assert!(matches!(ExactDesign::new(vec![]), Err(Error::EmptyDesign)));
    }

    #[test]
    fn approximate_design_sum_checked() {
        let s1 = TreatmentSequence::new(vec![1, 2], 2).unwrap();
        let s2 = TreatmentSequence::new(vec![2, 1], 2).unwrap();
        assert!(ApproximateDesign::new([(s1.clone(), 0.5), (s2.clone(), 0.4)]).is_err());
        let d = ApproximateDesign::new([(s1.clone(), 0.5), (s2.clone(), 0.5)]).unwrap();
        assert_eq!(d.proportion(&s1), 0.5);
        assert!(ApproximateDesign::new([(s1, -0.5), (s2, 1.5)]).is_err());
    }

    #[test]
    fn exact_to_approximate_counts() {
        let d = ExactDesign::from_rows(vec![vec![1, 2], vec![1, 2], vec![2, 1], vec![2, 2]], 2).unwrap();
        let a = d.to_approximate();
        assert_eq!(a.nominal_n(), 4.0);
        assert_eq!(a.proportion(&TreatmentSequence::new(vec![1, 2], 2).unwrap()), 0.5);
    }
}
