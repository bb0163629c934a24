//! The maximin problem `max_π min_γ Σ_ℓ π_ℓ h_ℓ(γ)`: its value `h*`, the
//! optimal class proportions, certification and exact recovery.
//!
//! The procedure has four steps: minimize `h*(γ) = max_ℓ h_ℓ(γ)`, select the
//! classes attaining the maximum at `γ*`, solve for proportions whose
//! gradient combination vanishes, and certify the result.

mod certify;
mod minimize;
mod proportions;
mod rationalize;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use certify::{certify, mixture_minimum, Certificate, DOMINANCE_TOL, DUALITY_TOL, STATIONARITY_TOL, SUM_TOL};
pub use minimize::{hstar_at, minimize_hstar, MinimizeOutcome};
pub use proportions::{active_classes, nnls, solve_proportions, ProportionSolution, PROPORTION_RESIDUAL_TOL};
pub use rationalize::{continued_fraction, rationalize, ExactSolution, MAX_DENOMINATOR};

use crate::error::{Error, Result};
use crate::scalar::format_rational;
use crate::symmetry::{all_tables, all_tables_exact, CoefficientTable, EquivalenceClass, GammaPoint};

/// Proportions below this are treated as zero and dropped from the solution.
const ZERO_PROPORTION: f64 = 1e-12;
/// Number of times the active-set tolerance is loosened tenfold.
const TOLERANCE_RETRIES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSettings {
    /// Relative tolerance for selecting active classes.
    pub tol_active: f64,
    /// Cap on Newton iterations in the minimization.
    pub max_iterations: usize,
    /// Attempt exact rational recovery.
    pub rational: bool,
    /// Restrict the class enumeration to sequences whose labels form runs.
    pub run_form_only: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol_active: 1e-7, max_iterations: 10_000, rational: false, run_form_only: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveClass {
    pub class: EquivalenceClass,
    pub proportion: f64,
    pub proportion_exact: Option<crate::scalar::Rational>,
}

impl Serialize for ActiveClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ActiveClass", 3)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("proportion", &self.proportion)?;
        match &self.proportion_exact {
            Some(r) => st.serialize_field("proportion_exact", &format_rational(r))?,
            None => st.skip_field("proportion_exact")?,
        }
        st.end()
    }
}

/// A certified solution of the maximin problem for given `(k, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximinSolution {
    pub k: usize,
    pub t: usize,
    pub gamma_star: GammaPoint,
    /// `tr C_{d*}[φ] / n` for the optimal designs.
    pub h_star: f64,
    /// Classes with positive optimal proportion, in class order.
    pub active: Vec<ActiveClass>,
    pub certificate: Certificate,
    pub exact: Option<ExactSolution>,
    pub settings: SolverSettings,
    pub iterations: usize,
}

impl MaximinSolution {
    /// Whether an exact form was recovered and verified.
    pub fn is_exact(&self) -> bool {
        self.exact.as_ref().is_some_and(|e| e.verified)
    }

    /// Proportion of a class (zero if inactive).
    pub fn proportion(&self, class: &EquivalenceClass) -> f64 {
        self.active.iter().find(|a| &a.class == class).map_or(0.0, |a| a.proportion)
    }

    /// `h*` as an exact fraction when verified.
    pub fn h_star_exact(&self) -> Option<&crate::scalar::Rational> {
        self.exact.as_ref().filter(|e| e.verified).map(|e| &e.h_star)
    }
}

impl Serialize for MaximinSolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MaximinSolution", 9)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("gamma_star", &self.gamma_star.0)?;
        st.serialize_field("h_star", &self.h_star)?;
        match self.h_star_exact() {
            Some(h) => st.serialize_field("h_star_exact", &format_rational(h))?,
            None => st.skip_field("h_star_exact")?,
        }
        st.serialize_field("active", &self.active)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.serialize_field("exact_verified", &self.is_exact())?;
        st.serialize_field("settings", &self.settings)?;
        st.end()
    }
}

/// Tables for every class of `k` periods on `t` treatments, optionally
/// restricted to run-form classes.
pub fn problem_tables(k: usize, t: usize, run_form_only: bool) -> Result<Vec<CoefficientTable>> {
    let mut tables = all_tables(k, t)?;
    if run_form_only {
        tables.retain(|tbl| tbl.class.is_run_form());
    }
    Ok(tables)
}

/// Runs all four steps for `(k, t)`.
pub fn solve(k: usize, t: usize, settings: &SolverSettings) -> Result<MaximinSolution> {
    if t < 2 {
        return Err(Error::TooFewTreatments { t, min: 2 });
    }
    let tables = problem_tables(k, t, settings.run_form_only)?;
    solve_tables(&tables, k, settings)
}

/// Runs all four steps on an explicit list of tables.
pub fn solve_tables(tables: &[CoefficientTable], k: usize, settings: &SolverSettings) -> Result<MaximinSolution> {
    let outcome = minimize_hstar(tables, settings.max_iterations)?;
    let t = tables[0].t;
    let (gamma, h_star) = (outcome.gamma, outcome.h_star);
    let mut tol = settings.tol_active;
    let mut last_error = None;
    for _ in 0..TOLERANCE_RETRIES {
        let candidates = active_classes(tables, &gamma, h_star, tol);
        let refs: Vec<&CoefficientTable> = candidates.iter().map(|&l| &tables[l]).collect();
        let attempt = solve_proportions(&refs, &gamma).and_then(|ps| {
            let mut pairs: Vec<(usize, f64)> = candidates
                .iter()
                .zip(&ps.proportions)
                .filter(|(_, &p)| p > ZERO_PROPORTION)
                .map(|(&l, &p)| (l, p))
                .collect();
            let total: f64 = pairs.iter().map(|(_, p)| p).sum();
            pairs.iter_mut().for_each(|(_, p)| *p /= total);
            let cert = certify(tables, &gamma, h_star, &pairs, ps.degeneracy)?;
            Ok((pairs, cert))
        });
        match attempt {
            Ok((pairs, certificate)) => {
                let exact = if settings.rational {
                    let exact_tables = exact_tables_like(tables, k, t)?;
                    rationalize(&exact_tables, &pairs, &gamma.0, h_star)
                } else {
                    None
                };
                let verified = exact.as_ref().is_some_and(|e| e.verified);
                let active = pairs
                    .iter()
                    .enumerate()
                    .map(|(i, &(l, p))| ActiveClass {
                        class: tables[l].class.clone(),
                        proportion: p,
                        proportion_exact: if verified {
                            exact.as_ref().map(|e| e.proportions[i].clone())
                        } else {
                            None
                        },
                    })
                    .collect();
                return Ok(MaximinSolution {
                    k,
                    t,
                    gamma_star: gamma,
                    h_star,
                    active,
                    certificate,
                    exact,
                    settings: *settings,
                    iterations: outcome.iterations,
                });
            }
            Err(e) => last_error = Some(e),
        }
        tol *= 10.0;
    }
    Err(last_error.expect("at least one attempt was made"))
}

/// Exact tables for the same classes as `tables`, in the same order.
fn exact_tables_like(
    tables: &[CoefficientTable],
    k: usize,
    t: usize,
) -> Result<Vec<CoefficientTable<crate::scalar::Rational>>> {
    let all = all_tables_exact(k, t)?;
    if all.len() == tables.len() {
        return Ok(all);
    }
    Ok(all.into_iter().filter(|e| tables.iter().any(|f| f.class == e.class)).collect())
}

/// Trace efficiency of the symmetric design generated by one class:
/// `min_γ h_ℓ(γ) / h*`.
pub fn single_class_efficiency(table: &CoefficientTable, h_star: f64) -> f64 {
    (table.minimum().0 / h_star).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> EquivalenceClass {
        EquivalenceClass::parse(s).unwrap()
    }

    #[test]
    fn k3_t4_proportions() {
        let sol = solve(3, 4, &SolverSettings::default()).unwrap();
        assert!((sol.h_star - 4.0 / 9.0).abs() < 1e-10);
        assert_eq!(sol.active.len(), 2);
        assert!((sol.proportion(&class("112")) - 1.0 / 3.0).abs() < 1e-8);
        assert!((sol.proportion(&class("122")) - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn exact_recovery() {
        let settings = SolverSettings { rational: true, ..Default::default() };
        let sol = solve(3, 3, &settings).unwrap();
        assert!(sol.is_exact());
        assert_eq!(format_rational(sol.h_star_exact().unwrap()), "16/39");
        let sol = solve(5, 2, &settings).unwrap();
        assert!(sol.is_exact());
        assert_eq!(format_rational(sol.h_star_exact().unwrap()), "7/5");
    }

    #[test]
    fn efficiency_of_single_classes() {
        let sol = solve(3, 3, &SolverSettings::default()).unwrap();
        let tables = all_tables(3, 3).unwrap();
        let eff = |c: &str| {
            let tbl = tables.iter().find(|t| t.class == class(c)).unwrap();
            single_class_efficiency(tbl, sol.h_star)
        };
        assert!((eff("122") - 0.61).abs() < 0.005);
        assert!(eff("112").abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let sol = solve(3, 2, &SolverSettings { rational: true, ..Default::default() }).unwrap();
        let v = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["gamma_star"].as_array().unwrap().len(), 5);
        assert_eq!(v["h_star_exact"], "1/3");
        assert!(v["active"][0]["proportion_exact"].is_string());
        assert!(v["certificate"]["kkt_residual"].is_number());
        assert_eq!(v["settings"]["tol_active"], 1e-7);
    }
}
