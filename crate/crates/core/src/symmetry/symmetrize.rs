//! Symmetrisation of designs and symmetric designs generated by classes.

use std::collections::BTreeMap;

use super::classes::{canonicalize, EquivalenceClass};
use crate::design::{ApproximateDesign, ExactDesign, TreatmentSequence};
use crate::error::{Error, Result};

/// Upper bound on the number of label images materialised for one class.
pub const MAX_CLASS_IMAGES: u128 = 5_000_000;

/// Number of distinct label images of a class with `m` blocks: `t!/(t−m)!`.
pub fn image_count(class: &EquivalenceClass, t: usize) -> u128 {
    let m = class.block_count();
    if m > t {
        return 0;
    }
    ((t - m + 1)..=t).map(|x| x as u128).product()
}

/// All sequences on `t` treatments that belong to `class`, in lexicographic order.
pub fn class_images(class: &EquivalenceClass, t: usize) -> Result<Vec<TreatmentSequence>> {
    let m = class.block_count();
    if m > t {
        return Err(Error::TooManyBlocks { blocks: m, t });
    }
    let count = image_count(class, t);
    if count > MAX_CLASS_IMAGES {
        return Err(Error::Unsupported(format!(
            "class {} has {count} images on {t} treatments",
            class.canonical_string()
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut assign = Vec::with_capacity(m);
    let mut used = vec![false; t + 1];
    injections(m, t, &mut assign, &mut used, &mut |f: &[usize]| {
        let entries = class.labels().iter().map(|&b| f[b - 1]).collect();
        out.push(TreatmentSequence::new(entries, t).expect("labels in range"));
    });
    out.sort();
    Ok(out)
}

/// Calls `visit` on every injective map `{1..m} → {1..t}` in lexicographic order.
fn injections(m: usize, t: usize, assign: &mut Vec<usize>, used: &mut [bool], visit: &mut impl FnMut(&[usize])) {
    if assign.len() == m {
        visit(assign);
        return;
    }
    for u in 1..=t {
        if !used[u] {
            used[u] = true;
            assign.push(u);
            injections(m, t, assign, used, visit);
            assign.pop();
            used[u] = false;
        }
    }
}

/// `π̄(s) = (1/t!) Σ_σ π(s_σ)`: every class keeps its total proportion,
/// spread evenly over all of its label images.
pub fn symmetrize(d: &ApproximateDesign) -> Result<ApproximateDesign> {
    let t = d.t();
    let mut mass: BTreeMap<EquivalenceClass, f64> = BTreeMap::new();
    for (s, &p) in d.proportions() {
        *mass.entry(canonicalize(s)).or_default() += p;
    }
    let parts: Vec<(EquivalenceClass, f64)> = mass.into_iter().collect();
    Ok(symmetric_design(&parts, t)?.with_nominal_n(d.nominal_n()))
}

/// The symmetric approximate design giving total proportion `π_ℓ` to each
/// listed class, split evenly over its images.
pub fn symmetric_design(classes: &[(EquivalenceClass, f64)], t: usize) -> Result<ApproximateDesign> {
    let total: f64 = classes.iter().map(|(_, p)| p).sum();
    let mut entries = Vec::new();
    for (class, p) in classes {
        if *p == 0.0 {
            continue;
        }
        let images = class_images(class, t)?;
        let each = p / images.len() as f64;
        entries.extend(images.into_iter().map(|s| (s, each)));
    }
    let split: f64 = entries.iter().map(|(_, p)| p).sum();
    let scale = if split > 0.0 { total / split } else { 1.0 };
    ApproximateDesign::new(entries.into_iter().map(|(s, p)| (s, p * scale)))
}

/// The exact design with one subject per label image of `class`.
pub fn symmetric_design_from_class(class: &EquivalenceClass, t: usize) -> Result<ExactDesign> {
    ExactDesign::new(class_images(class, t)?)
}

/// The exact symmetric design with `copies[i]` subjects on every image of
/// `classes[i]`.
pub fn symmetric_exact_design(classes: &[(EquivalenceClass, usize)], t: usize) -> Result<ExactDesign> {
    let mut rows = Vec::new();
    for (class, copies) in classes {
        for s in class_images(class, t)? {
            rows.extend(std::iter::repeat_n(s, *copies));
        }
    }
    ExactDesign::new(rows)
}

/// Whether proportions are constant over the images of each class.
pub fn is_symmetric(d: &ApproximateDesign, tol: f64) -> Result<bool> {
    let t = d.t();
    let mut seen: BTreeMap<EquivalenceClass, ()> = BTreeMap::new();
    for s in d.proportions().keys() {
        let class = canonicalize(s);
        if seen.insert(class.clone(), ()).is_some() {
            continue;
        }
        let images = class_images(&class, t)?;
        let p0 = d.proportion(&images[0]);
        if images.iter().any(|s| (d.proportion(s) - p0).abs() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{info_phi, info_xi_design};

    fn class(v: &[usize]) -> EquivalenceClass {
        EquivalenceClass::new(v.to_vec()).unwrap()
    }

    fn seq(v: &[usize], t: usize) -> TreatmentSequence {
        TreatmentSequence::new(v.to_vec(), t).unwrap()
    }

    #[test]
    fn image_counts() {
        assert_eq!(symmetric_design_from_class(&class(&[1, 1, 2]), 2).unwrap().n(), 2);
        assert_eq!(symmetric_design_from_class(&class(&[1, 1, 2, 2, 3, 3, 3]), 5).unwrap().n(), 60);
        assert_eq!(symmetric_design_from_class(&class(&[1, 1, 2, 2]), 3).unwrap().n(), 6);
        assert_eq!(image_count(&class(&[1, 2, 3]), 2), 0);
        assert!(symmetric_design_from_class(&class(&[1, 2, 3]), 2).is_err());
    }

    #[test]
    fn images_are_distinct_and_in_class() {
        let c = class(&[1, 2, 1, 3]);
        let imgs = class_images(&c, 5).unwrap();
        assert_eq!(imgs.len(), 60);
        assert!(imgs.windows(2).all(|w| w[0] < w[1]));
        assert!(imgs.iter().all(|s| canonicalize(s) == c));
    }

    #[test]
    fn single_sequence_symmetrizes_to_orbit_average() {
        let d = ApproximateDesign::new([(seq(&[1, 1, 2], 2), 1.0)]).unwrap();
        let s = symmetrize(&d).unwrap();
        assert_eq!(s.proportions().len(), 2);
        assert!((s.proportion(&seq(&[1, 1, 2], 2)) - 0.5).abs() < 1e-15);
        assert!((s.proportion(&seq(&[2, 2, 1], 2)) - 0.5).abs() < 1e-15);
        assert!(is_symmetric(&s, 1e-12).unwrap());
        assert!(!is_symmetric(&d, 1e-12).unwrap());
    }

    #[test]
    fn symmetric_design_is_fixed_point() {
        let d = symmetric_design(&[(class(&[1, 2, 2]), 0.6), (class(&[1, 1, 2]), 0.4)], 3).unwrap();
        let s = symmetrize(&d).unwrap();
        assert!(s.max_difference(&d) < 1e-15);
    }

    #[test]
    fn symmetrization_does_not_lower_the_trace() {
        let d =
            ApproximateDesign::new([(seq(&[1, 2, 2], 3), 0.5), (seq(&[3, 1, 1], 3), 0.25), (seq(&[2, 3, 2], 3), 0.25)])
                .unwrap();
        let before = info_phi(&info_xi_design(&d)).unwrap().trace();
        let after = info_phi(&info_xi_design(&symmetrize(&d).unwrap())).unwrap().trace();
        assert!(after >= before - 1e-9, "{after} < {before}");
    }
}
