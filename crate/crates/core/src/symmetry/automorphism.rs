//! The automorphism group `G_d = {σ ∈ S_t : d_σ = d}` of an exact design,
//! where equality is up to a permutation of subjects.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::design::{ExactDesign, TreatmentSequence};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest `t` for which the exhaustive search over `S_t` is run.
pub const MAX_AUTOMORPHISM_T: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomorphismReport {
    pub order: usize,
    pub transitive: bool,
    pub doubly_transitive: bool,
    /// One-based image vectors of a generating set.
    #[serde(serialize_with = "serialize_perms")]
    pub generators: Vec<Permutation>,
}

fn serialize_perms<S: serde::Serializer>(perms: &[Permutation], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(perms.len()))?;
    for p in perms {
        seq.serialize_element(&p.images())?;
    }
    seq.end()
}

/// All elements of `G_d`, in lexicographic order.
pub fn automorphisms(d: &ExactDesign) -> Result<Vec<Permutation>> {
    let t = d.t();
    if t > MAX_AUTOMORPHISM_T {
        return Err(Error::Unsupported(format!(
            "automorphism search is limited to t <= {MAX_AUTOMORPHISM_T}, got t = {t}"
        )));
    }
    let rows = d.sorted_rows();
    Ok(Permutation::all(t)
        .filter(|sigma| {
            let mut image: Vec<TreatmentSequence> = rows.iter().map(|s| s.relabel(sigma)).collect();
            image.sort();
            image == rows
        })
        .collect())
}

pub fn automorphism_group(d: &ExactDesign) -> Result<AutomorphismReport> {
    let t = d.t();
    let group = automorphisms(d)?;
    let points: BTreeSet<usize> = group.iter().map(|g| g.apply(1)).collect();
    let transitive = points.len() == t;
    let pairs: BTreeSet<(usize, usize)> = group.iter().map(|g| (g.apply(1), g.apply(2))).collect();
    let doubly_transitive = transitive && pairs.len() == t * (t - 1);
    Ok(AutomorphismReport { order: group.len(), transitive, doubly_transitive, generators: generating_set(&group) })
}

/// Greedy generating set: scan the group in order and keep each element not
/// already generated by the ones kept so far.
fn generating_set(group: &[Permutation]) -> Vec<Permutation> {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut span: HashSet<Permutation> = HashSet::new();
    if let Some(first) = group.first() {
        span.insert(Permutation::identity(first.degree()));
    }
    for g in group {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        span = closure(&gens, span);
        if span.len() == group.len() {
            break;
        }
    }
    gens
}

fn closure(gens: &[Permutation], mut span: HashSet<Permutation>) -> HashSet<Permutation> {
    let mut frontier: Vec<Permutation> = span.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = g.compose(&x);
            if span.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    span
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{symmetric_design_from_class, EquivalenceClass};

    #[test]
    fn symmetric_design_has_full_group() {
        let d = symmetric_design_from_class(&EquivalenceClass::parse("1122").unwrap(), 4).unwrap();
        let r = automorphism_group(&d).unwrap();
        assert_eq!(r.order, 24);
        assert!(r.transitive && r.doubly_transitive);
        let span = closure(&r.generators, HashSet::from([Permutation::identity(4)]));
        assert_eq!(span.len(), 24);
    }

    #[test]
    fn pinned_labels_leave_only_identity() {
        let d = ExactDesign::from_rows(vec![vec![1, 2]], 3).unwrap();
        let r = automorphism_group(&d).unwrap();
        assert_eq!(r.order, 1);
        assert!(!r.transitive);
        assert!(r.generators.is_empty());
    }

    #[test]
    fn cyclic_design_is_transitive_only() {
        let d = ExactDesign::from_rows(vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1]], 4).unwrap();
        let r = automorphism_group(&d).unwrap();
        assert_eq!(r.order, 4);
        assert!(r.transitive);
        assert!(!r.doubly_transitive);
        assert_eq!(24 % r.order, 0);
    }

    #[test]
    fn large_t_is_unsupported() {
        let d = ExactDesign::from_rows(vec![vec![1, 9]], 9).unwrap();
        assert!(matches!(automorphism_group(&d), Err(Error::Unsupported(_))));
    }
}
