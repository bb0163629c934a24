//! Printed designs, reduced-design constructions and their efficiencies.

mod common;

use common::*;
use proptest::prelude::*;
use xover_core::constructions::{
    build_reduced_design, expand_triplet, gf_triplets, oa_triplets, Method, StartingDesign,
};
use xover_core::evaluation::{compare_period_models, evaluate, evaluate_against};
use xover_core::info::{info_phi, info_xi_design};
use xover_core::optimizer::{single_class_efficiency, solve, SolverSettings};
use xover_core::symmetry::{automorphism_group, check_strong_balance, coefficients, symmetric_design_from_class};
use xover_core::{EfficiencyReport, ExactDesign, MaximinSolution, Permutation};

fn optimum(k: usize, t: usize) -> MaximinSolution {
    solve(k, t, &SolverSettings::default()).unwrap()
}

fn from_triplets(triplets: &[[usize; 3]], pattern: &str, t: usize) -> ExactDesign {
    let p = class(pattern);
    ExactDesign::new(triplets.iter().map(|tr| expand_triplet(tr, &p, t).unwrap()).collect()).unwrap()
}

fn reduced(t: usize, pattern: &str, method: Method, seed: Option<[usize; 3]>) -> ExactDesign {
    build_reduced_design(t, &class(pattern), method, seed).unwrap().design
}

fn report(d: &ExactDesign, k: usize) -> EfficiencyReport {
    evaluate(d, &optimum(k, d.t()), false).unwrap()
}

#[test]
fn three_period_printed_design_is_optimal() {
    let d = design(DESIGN_K3_T4, 4);
    assert_eq!(d.n(), 36);
    let c = info_phi(&info_xi_design(&d)).unwrap();
    assert!((c.trace() - 16.0).abs() <= 1e-9);
    let r = report(&d, 3);
    assert!((r.trace_eff - 1.0).abs() <= 1e-9);
    assert!(r.completely_symmetric);
}

#[test]
fn five_period_printed_design_is_optimal() {
    let d = design(DESIGN_K5_T3, 3);
    assert_eq!(d.n(), 54);
    let r = report(&d, 5);
    assert!((r.trace_eff - 1.0).abs() <= 1e-9, "{}", r.trace_eff);
}

#[test]
fn printed_reduced_design_is_reproduced() {
    let built = reduced(5, "1122333", Method::Oa, None);
    assert!(built.same_up_to_subject_order(&design(DESIGN_K7_T5, 5)));
    let mut printed = triplets(START_T5);
    printed.sort_unstable();
    assert_eq!(oa_triplets(5).unwrap().triplets, printed);
}

#[test]
fn orthogonal_array_property() {
    for t in 3..=10 {
        assert!(oa_triplets(t).unwrap().is_orthogonal_array(), "oa t={t}");
    }
    for t in [4, 5, 7, 8, 9] {
        assert!(gf_triplets(t, [1, 2, 3]).unwrap().is_orthogonal_array(), "gf t={t}");
    }
    for (text, t) in [(START_T8, 8), (START_T9, 9)] {
        assert!(StartingDesign { t, triplets: triplets(text) }.is_orthogonal_array());
    }
}

#[test]
fn reduced_six_period_efficiencies() {
    for (i, (a, e)) in REDUCED_K6.into_iter().enumerate() {
        let t = i + 4;
        let r = report(&reduced(t, "112233", Method::Oa, None), 6);
        assert!((r.a_eff - a).abs() <= 5e-4, "t={t}: {}", r.a_eff);
        assert!((r.d_eff - a).abs() <= 5e-4, "t={t}: {}", r.d_eff);
        assert!((r.e_eff - e).abs() <= 5e-4, "t={t}: {}", r.e_eff);
    }
}

#[test]
fn reduced_seven_period_efficiencies() {
    for (i, (a, e)) in REDUCED_K7.into_iter().enumerate() {
        let t = i + 4;
        let r = report(&reduced(t, "1122333", Method::Oa, None), 7);
        assert!((r.a_eff - a).abs() <= 5e-4, "t={t}: {}", r.a_eff);
        assert!((r.d_eff - a).abs() <= 5e-4, "t={t}: {}", r.d_eff);
        if t == 10 {
            assert!((r.e_eff - 0.9526).abs() <= 1e-4, "t={t}: {}", r.e_eff);
        } else {
            assert!((r.e_eff - e).abs() <= 5e-4, "t={t}: {}", r.e_eff);
        }
    }
}

#[test]
fn field_built_efficiencies() {
    let seeds = [(8, [1, 2, 3]), (9, [1, 2, 9])];
    for ((t, e6, e7), (_, seed)) in REDUCED_GF.into_iter().zip(seeds) {
        for (pattern, k, e) in [("112233", 6, e6), ("1122333", 7, e7)] {
            let r = report(&reduced(t, pattern, Method::Gf, Some(seed)), k);
            assert!(r.completely_symmetric);
            assert!((r.a_eff - e).abs() <= 5e-4, "t={t} k={k}: {}", r.a_eff);
        }
    }
}

#[test]
fn printed_field_starting_designs_match_the_construction() {
    for (text, t, seed) in [(START_T8, 8, [1, 2, 3]), (START_T9, 9, [1, 2, 9])] {
        for (pattern, k) in [("112233", 6), ("1122333", 7)] {
            let printed = report(&from_triplets(&triplets(text), pattern, t), k);
            let built = report(&reduced(t, pattern, Method::Gf, Some(seed)), k);
            for (x, y) in printed.contrast_eigenvalues.iter().zip(&built.contrast_eigenvalues) {
                assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}

#[test]
fn field_seeds_with_equal_ratio_give_isomorphic_designs() {
    let a = report(&reduced(5, "1122333", Method::Gf, Some([1, 2, 3])), 7);
    let b = report(&reduced(5, "1122333", Method::Gf, Some([2, 4, 1])), 7);
    assert_eq!(a.contrast_eigenvalues.len(), b.contrast_eigenvalues.len());
    for (x, y) in a.contrast_eigenvalues.iter().zip(&b.contrast_eigenvalues) {
        assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
    }
    let c = report(&reduced(5, "1122333", Method::Gf, Some([1, 2, 4])), 7);
    assert!((a.a_eff - c.a_eff).abs() > 1e-3);
}

#[test]
fn constructed_designs_are_strongly_balanced() {
    for t in 3..=10 {
        for pattern in ["112233", "1122333", "123"] {
            let d = reduced(t, pattern, Method::Oa, None);
            assert!(check_strong_balance(&d).balanced(), "oa t={t} {pattern}");
        }
    }
    for t in [4, 5, 7, 8, 9, 16] {
        let d = reduced(t, "1122333", Method::Gf, None);
        assert!(check_strong_balance(&d).balanced(), "gf t={t}");
    }
    for (c, t) in [("122", 4), ("11233", 3), ("1122333", 4)] {
        assert!(check_strong_balance(&symmetric_design_from_class(&class(c), t).unwrap()).balanced());
    }
}

#[test]
fn automorphism_groups_of_reduced_designs() {
    for t in [4, 5, 7] {
        let g = automorphism_group(&reduced(t, "1122333", Method::Oa, None)).unwrap();
        assert!(g.doubly_transitive, "t={t}");
        assert_eq!(g.order, t * (t - 1));
    }
}

#[test]
fn complete_symmetry_of_reduced_designs() {
    for t in [4, 5, 7] {
        let d = reduced(t, "1122333", Method::Oa, None);
        assert!(report(&d, 7).completely_symmetric, "t={t}");
        assert!(evaluate(&d, &optimum(7, t), true).unwrap().completely_symmetric, "t={t}");
    }
    let d = reduced(6, "112233", Method::Oa, None);
    assert!(check_strong_balance(&d).balanced());
    assert!(!report(&d, 6).completely_symmetric);
    assert!(!evaluate(&d, &optimum(6, 6), true).unwrap().completely_symmetric);
}

#[test]
fn period_models_agree_on_transitive_balanced_designs() {
    for t in [4, 5, 7] {
        let cmp = compare_period_models(&reduced(t, "112233", Method::Oa, None)).unwrap();
        assert!(cmp.equal, "t={t}: {cmp:?}");
    }
    let cmp = compare_period_models(&symmetric_design_from_class(&class("11223"), 4).unwrap()).unwrap();
    assert!(cmp.equal);
}

#[test]
fn trace_efficiency_matches_single_class_efficiency() {
    for (k, t) in [(3, 3), (5, 4), (6, 5), (7, 4)] {
        let sol = optimum(k, t);
        for c in xover_core::symmetry::enumerate_classes(k, t).unwrap() {
            if xover_core::symmetry::image_count(&c, t) > 5000 {
                continue;
            }
            let d = symmetric_design_from_class(&c, t).unwrap();
            let r = evaluate_against(&d, sol.h_star, false).unwrap();
            let direct = single_class_efficiency(&coefficients(&c, t).unwrap(), sol.h_star);
            if r.estimable {
                assert!((r.trace_eff - direct).abs() <= 1e-8, "{c:?} t={t}: {} vs {direct}", r.trace_eff);
            } else {
                assert!(direct <= 1e-8);
            }
        }
    }
}

fn reduced_and_permutation() -> impl Strategy<Value = (usize, usize, Permutation)> {
    (4usize..=7, 6usize..=7).prop_flat_map(|(t, k)| {
        let perm =
            Just((1..=t).collect::<Vec<_>>()).prop_shuffle().prop_map(|im| Permutation::from_images(&im).unwrap());
        (Just(t), Just(k), perm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn relabelled_designs_have_identical_reports((t, k, sigma) in reduced_and_permutation()) {
        let pattern = if k == 6 { "112233" } else { "1122333" };
        let d = reduced(t, pattern, Method::Oa, None);
        let h = optimum(k, t).h_star;
        let a = evaluate_against(&d, h, false).unwrap();
        let b = evaluate_against(&d.relabel(&sigma), h, false).unwrap();
        prop_assert_eq!(a.completely_symmetric, b.completely_symmetric);
        prop_assert_eq!(a.estimable, b.estimable);
        for (x, y) in [(a.trace_eff, b.trace_eff), (a.a_eff, b.a_eff), (a.d_eff, b.d_eff), (a.e_eff, b.e_eff)] {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        for (x, y) in a.contrast_eigenvalues.iter().zip(&b.contrast_eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}
