//! Strong balance on the periods.

use serde::Serialize;

use crate::design::DesignRef;

/// Outcome of the three balance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrongBalanceReport {
    /// Each treatment appears equally often in the first period.
    pub first_period: bool,
    /// In each later period, each treatment is preceded by itself equally often.
    pub self_preceded: bool,
    /// In each later period, the number of times `u` is preceded by `v ≠ u`
    /// does not depend on `(u, v)`.
    pub cross_preceded: bool,
}

impl StrongBalanceReport {
    pub fn balanced(&self) -> bool {
        self.first_period && self.self_preceded && self.cross_preceded
    }
}

fn all_equal(values: impl IntoIterator<Item = f64>, tol: f64) -> bool {
    let mut it = values.into_iter();
    match it.next() {
        None => true,
        Some(first) => it.all(|v| (v - first).abs() <= tol),
    }
}

/// Checks the conditions with subject counts (exact designs) or
/// proportions (approximate designs).
pub fn check_strong_balance<'a>(d: impl Into<DesignRef<'a>>) -> StrongBalanceReport {
    let d = d.into();
    let (t, k) = (d.t(), d.k());
    // counts[j][u][v]: weight of subjects with u in period j preceded by v
    let mut counts = vec![vec![vec![0.0f64; t + 1]; t + 1]; k];
    for (s, w) in d.weighted_sequences() {
        for j in 0..k {
            counts[j][s.entries()[j]][s.predecessor(j)] += w;
        }
    }
    let tol = 1e-9 * d.size().max(1.0);
    let first_period = all_equal((1..=t).map(|u| counts[0][u][0]), tol);
    let self_preceded = (1..k).all(|j| all_equal((1..=t).map(|u| counts[j][u][u]), tol));
    let cross_preceded = (1..k).all(|j| {
        let c = &counts[j];
        all_equal((1..=t).flat_map(|u| (1..=t).filter(move |&v| v != u).map(move |v| c[u][v])), tol)
    });
    StrongBalanceReport { first_period, self_preceded, cross_preceded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::ExactDesign;
    use crate::symmetry::{symmetric_design_from_class, EquivalenceClass};

    #[test]
    fn symmetric_designs_are_balanced() {
        for c in ["112", "1213", "11223", "1122333"] {
            let d = symmetric_design_from_class(&EquivalenceClass::parse(c).unwrap(), 4).unwrap();
            assert!(check_strong_balance(&d).balanced(), "{c}");
        }
    }

    #[test]
    fn single_subject_fails_first_period() {
        let d = ExactDesign::from_rows(vec![vec![1, 2, 2]], 2).unwrap();
        let r = check_strong_balance(&d);
        assert!(!r.first_period);
        assert!(!r.balanced());
    }

    #[test]
    fn latin_square_pair() {
        let d = ExactDesign::from_rows(vec![vec![1, 2], vec![2, 1]], 2).unwrap();
        assert!(check_strong_balance(&d).balanced());
        let d = ExactDesign::from_rows(vec![vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]], 3).unwrap();
        let r = check_strong_balance(&d);
        assert!(r.first_period && r.self_preceded);
        assert!(!r.cross_preceded);
    }
}
