//! Subcommand implementations.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use xover_core::evaluation::{compare_period_models, default_symmetry_tol, evaluate_against, is_completely_symmetric};
use xover_core::info::{info_phi, info_phi_periods, info_theta_design, info_xi_design};
use xover_core::io::{read_approximate_design, read_exact_design, write_approximate_design, write_exact_design};
use xover_core::optimizer::single_class_efficiency;
use xover_core::symmetry::{
    automorphism_group, check_strong_balance, coefficients, enumerate_classes, image_count, symmetric_design_from_class,
};
use xover_core::{
    build_reduced_design, solve, ApproximateDesign, EquivalenceClass, ExactDesign, MaximinSolution, SolverSettings,
};

use crate::render::{aligned, csv, h_value, proportion, rounded};
use crate::{
    CheckArgs, ClassesArgs, ConstructArgs, DesignInput, EvaluateArgs, Format, GenerateArgs, OptimizeArgs, SolverArgs,
    TableArgs, UsageError,
};

/// Admissible numbers of treatments for the optimizer.
const T_RANGE: RangeInclusive<usize> = 2..=30;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(usage(format!("-k must be at least 2, got {k}")));
    }
    Ok(())
}

fn check_t(t: usize) -> Result<()> {
    if !T_RANGE.contains(&t) {
        return Err(usage(format!("-t must lie in {}..={}, got {t}", T_RANGE.start(), T_RANGE.end())));
    }
    Ok(())
}

fn parse_class(s: &str) -> Result<EquivalenceClass> {
    EquivalenceClass::parse(s).map_err(|e| usage(format!("invalid class `{s}`: {e}")))
}

fn settings(a: &SolverArgs) -> Result<SolverSettings> {
    let mut s = SolverSettings { rational: a.rational, run_form_only: a.run_form, ..SolverSettings::default() };
    if let Some(tol) = a.tol_active {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(usage(format!("--tol-active must lie in (0, 1), got {tol}")));
        }
        s.tol_active = tol;
    }
    Ok(s)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to standard output"),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

/// Parses `a..b` (inclusive), `a..=b`, a comma list or a single value.
pub fn parse_t_values(range: &str) -> Result<Vec<usize>> {
    let number = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("invalid value `{s}` in -t {range}")));
    let values: Vec<usize> = if let Some((a, b)) = range.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (number(a)?..=number(b)?).collect()
    } else {
        range.split(',').map(number).collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(usage(format!("-t {range} is an empty range")));
    }
    values.iter().try_for_each(|&t| check_t(t))?;
    Ok(values)
}

pub fn optimize(a: &OptimizeArgs) -> Result<()> {
    check_k(a.k)?;
    check_t(a.t)?;
    let sol = solve(a.k, a.t, &settings(&a.solver)?)?;
    let text = match a.format {
        Format::Json => to_json(&sol)?,
        Format::Csv => {
            let mut rows = vec![vec!["class".into(), "proportion".into(), "exact".into()]];
            for c in &sol.active {
                let exact = c.proportion_exact.as_ref().map(xover_core::scalar::format_rational).unwrap_or_default();
                rows.push(vec![c.class.to_string(), c.proportion.to_string(), exact]);
            }
            let exact = sol.h_star_exact().map(xover_core::scalar::format_rational).unwrap_or_default();
            rows.push(vec!["h*".into(), sol.h_star.to_string(), exact]);
            csv(&rows)
        }
        Format::Table => optimize_text(&sol),
    };
    emit(a.output.as_deref(), &text)
}

fn optimize_text(sol: &MaximinSolution) -> String {
    let mut rows = vec![vec!["class".into(), "proportion".into()]];
    for c in &sol.active {
        let p = c
            .proportion_exact
            .as_ref()
            .map_or_else(|| format!("{:.6}", c.proportion), xover_core::scalar::format_rational);
        rows.push(vec![c.class.to_string(), p]);
    }
    let h = sol.h_star_exact().map_or_else(|| format!("{:.6}", sol.h_star), xover_core::scalar::format_rational);
    rows.push(vec!["h*".into(), h]);
    let g: Vec<String> = sol.gamma_star.0.iter().map(|x| format!("{x:.6}")).collect();
    let cert = &sol.certificate;
    let mut out = format!("k = {}, t = {}\n", sol.k, sol.t);
    out += &aligned(&rows);
    out += &format!("gamma*: {}\n", g.join(" "));
    out += &format!(
        "certificate: passed (inactive gap {:.1e}, stationarity residual {:.1e}, degeneracy {})\n",
        cert.max_inactive_gap, cert.kkt_residual, cert.degeneracy
    );
    if sol.settings.rational {
        out += if sol.is_exact() { "exact: verified\n" } else { "exact: not recovered, values are floating point\n" };
    }
    out
}

pub fn table(a: &TableArgs) -> Result<()> {
    check_k(a.k)?;
    let ts = parse_t_values(&a.t)?;
    let settings = settings(&a.solver)?;
    let solutions: Vec<MaximinSolution> = ts.iter().map(|&t| solve(a.k, t, &settings)).collect::<Result<_, _>>()?;
    let mut classes: BTreeSet<EquivalenceClass> =
        solutions.iter().flat_map(|s| s.active.iter().map(|c| c.class.clone())).collect();
    for c in &a.classes {
        let c = parse_class(c)?;
        if c.k() != a.k {
            return Err(usage(format!("class {c} has {} periods, expected {}", c.k(), a.k)));
        }
        classes.insert(c);
    }
    let efficiency = |c: &EquivalenceClass, s: &MaximinSolution| -> Option<f64> {
        coefficients(c, s.t).ok().map(|tbl| single_class_efficiency(&tbl, s.h_star))
    };
    let text = match a.format {
        Format::Json => {
            let columns: Vec<_> = solutions
                .iter()
                .map(|s| {
                    let eff: serde_json::Map<String, serde_json::Value> = if a.efficiency {
                        classes.iter().filter_map(|c| Some((c.canonical_string(), json!(efficiency(c, s)?)))).collect()
                    } else {
                        Default::default()
                    };
                    json!({ "t": s.t, "solution": s, "efficiency": eff })
                })
                .collect();
            to_json(&json!({ "k": a.k, "columns": columns }))?
        }
        Format::Table | Format::Csv => {
            let mut header = vec![format!("k = {}", a.k)];
            header.extend(ts.iter().map(|t| format!("t={t}")));
            let mut rows = vec![header];
            for c in &classes {
                let mut row = vec![c.to_string()];
                for s in &solutions {
                    row.push(if c.block_count() > s.t {
                        "-".into()
                    } else {
                        let active = s.active.iter().find(|x| &x.class == c);
                        active.map_or("0".into(), |x| proportion(x.proportion, x.proportion_exact.as_ref()))
                    });
                }
                rows.push(row);
            }
            let mut h_row = vec!["h*".to_string()];
            h_row.extend(solutions.iter().map(|s| h_value(s.h_star, s.h_star_exact())));
            rows.push(h_row);
            if a.efficiency {
                for c in &classes {
                    let mut row = vec![format!("Eff. {c}")];
                    row.extend(solutions.iter().map(|s| efficiency(c, s).map_or("-".into(), rounded)));
                    rows.push(row);
                }
            }
            if a.format == Format::Csv {
                csv(&rows)
            } else {
                aligned(&rows)
            }
        }
    };
    emit(a.output.as_deref(), &text)
}

pub fn classes(a: &ClassesArgs) -> Result<()> {
    check_k(a.k)?;
    if a.t < 2 {
        return Err(usage(format!("-t must be at least 2, got {}", a.t)));
    }
    let list = enumerate_classes(a.k, a.t)?;
    let text = match a.format {
        Format::Json => {
            let items: Vec<_> = list
                .iter()
                .map(|c| json!({ "class": c, "blocks": c.block_count(), "sequences": image_count(c, a.t).to_string() }))
                .collect();
            to_json(&json!({ "k": a.k, "t": a.t, "count": list.len(), "classes": items }))?
        }
        Format::Table | Format::Csv => {
            let mut rows = vec![vec!["class".into(), "blocks".into(), "sequences".into()]];
            rows.extend(
                list.iter().map(|c| vec![c.to_string(), c.block_count().to_string(), image_count(c, a.t).to_string()]),
            );
            if a.format == Format::Csv {
                csv(&rows)
            } else {
                format!("{} classes for k = {}, t = {}\n{}", list.len(), a.k, a.t, aligned(&rows))
            }
        }
    };
    emit(a.output.as_deref(), &text)
}

enum Loaded {
    Exact(ExactDesign),
    Approximate(ApproximateDesign),
}

impl Loaded {
    fn k(&self) -> usize {
        match self {
            Loaded::Exact(d) => d.k(),
            Loaded::Approximate(d) => d.k(),
        }
    }

    fn t(&self) -> usize {
        match self {
            Loaded::Exact(d) => d.t(),
            Loaded::Approximate(d) => d.t(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Loaded::Exact(_) => "exact",
            Loaded::Approximate(_) => "approximate",
        }
    }

    fn size(&self) -> f64 {
        match self {
            Loaded::Exact(d) => d.n() as f64,
            Loaded::Approximate(d) => d.nominal_n(),
        }
    }

    fn as_ref(&self) -> xover_core::DesignRef<'_> {
        match self {
            Loaded::Exact(d) => d.into(),
            Loaded::Approximate(d) => d.into(),
        }
    }
}

fn load(input: &DesignInput) -> Result<Loaded> {
    let path = &input.input;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let loaded = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).context("reading standard input")?;
        Loaded::Exact(read_exact_design(buf.as_slice(), input.t, input.transpose)?)
    } else {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        if is_json {
            if input.transpose {
                return Err(usage("--transpose applies only to CSV input"));
            }
            Loaded::Approximate(read_approximate_design(file)?)
        } else {
            Loaded::Exact(read_exact_design(file, input.t, input.transpose)?)
        }
    };
    if let Some(t) = input.t {
        if t != loaded.t() {
            return Err(usage(format!("-t {t} does not match the design's {} treatments", loaded.t())));
        }
    }
    Ok(loaded)
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let d = load(&a.design)?;
    check_t(d.t())?;
    let sol = solve(d.k(), d.t(), &settings(&a.solver)?)?;
    let r = evaluate_against(d.as_ref(), sol.h_star, a.periods_model)?;
    let text = match a.format {
        Format::Json => to_json(&json!({
            "design": d.kind(),
            "k": d.k(),
            "t": d.t(),
            "n": d.size(),
            "h_star": sol.h_star,
            "report": r,
        }))?,
        Format::Csv => csv(&[
            [
                "k",
                "t",
                "n",
                "h_star",
                "trace",
                "trace_eff",
                "a_eff",
                "d_eff",
                "e_eff",
                "completely_symmetric",
                "estimable",
            ]
            .map(String::from)
            .to_vec(),
            vec![
                d.k().to_string(),
                d.t().to_string(),
                d.size().to_string(),
                sol.h_star.to_string(),
                r.trace.to_string(),
                r.trace_eff.to_string(),
                r.a_eff.to_string(),
                r.d_eff.to_string(),
                r.e_eff.to_string(),
                r.completely_symmetric.to_string(),
                r.estimable.to_string(),
            ],
        ]),
        Format::Table => {
            let eig: Vec<String> = r.contrast_eigenvalues.iter().map(|x| format!("{x:.6}")).collect();
            let model = if a.periods_model { "with period effects" } else { "without period effects" };
            let rows = vec![
                vec!["design".into(), format!("{}, n = {}, k = {}, t = {}", d.kind(), d.size(), d.k(), d.t())],
                vec!["model".into(), model.into()],
                vec!["h*".into(), format!("{:.6}", sol.h_star)],
                vec!["trace".into(), format!("{:.6}", r.trace)],
                vec!["trace efficiency".into(), format!("{:.3}", r.trace_eff)],
                vec!["A-efficiency".into(), format!("{:.3}", r.a_eff)],
                vec!["D-efficiency".into(), format!("{:.3}", r.d_eff)],
                vec!["E-efficiency".into(), format!("{:.3}", r.e_eff)],
                vec!["completely symmetric".into(), yes(r.completely_symmetric)],
                vec!["estimable".into(), yes(r.estimable)],
                vec!["contrast eigenvalues".into(), eig.join(" ")],
            ];
            aligned_pairs(&rows)
        }
    };
    emit(a.output.as_deref(), &text)
}

fn aligned_pairs(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(|r| r[0].chars().count()).max().unwrap_or(0);
    rows.iter().map(|r| format!("{:width$}  {}\n", r[0], r[1])).collect()
}

fn design_text(d: &ExactDesign, format: Format, transpose: bool) -> Result<String> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            if transpose {
                return Err(usage("--transpose applies only to CSV output"));
            }
            write_approximate_design(&mut buf, &d.to_approximate())?;
            buf.push(b'\n');
        }
        Format::Csv | Format::Table => write_exact_design(&mut buf, d, transpose)?,
    }
    Ok(String::from_utf8(buf).expect("writers emit UTF-8"))
}

/// `design.csv` → `design.info.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("info.json")
}

pub fn construct(a: &ConstructArgs) -> Result<()> {
    let pattern = parse_class(&a.pattern)?;
    let built = build_reduced_design(a.t, &pattern, a.method, a.seed_triplet)?;
    emit(a.output.as_deref(), &design_text(&built.design, a.format, a.transpose)?)?;
    if let Some(out) = &a.output {
        let record = json!({
            "construction": built.info,
            "n": built.design.n(),
            "k": built.design.k(),
            "t": built.design.t(),
            "transposed": a.transpose,
        });
        emit(Some(&sidecar_path(out)), &to_json(&record)?)?;
    }
    Ok(())
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let pattern = parse_class(&a.pattern)?;
    if let Some(k) = a.k {
        if k != pattern.k() {
            return Err(usage(format!("pattern {pattern} has {} periods, -k is {k}", pattern.k())));
        }
    }
    if a.t < 2 {
        return Err(usage(format!("-t must be at least 2, got {}", a.t)));
    }
    let d = symmetric_design_from_class(&pattern, a.t)?;
    emit(a.output.as_deref(), &design_text(&d, a.format, a.transpose)?)
}

#[derive(Serialize)]
struct CheckReport {
    k: usize,
    t: usize,
    n: f64,
    strong_balance: xover_core::symmetry::StrongBalanceReport,
    strongly_balanced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    automorphisms: Option<xover_core::symmetry::AutomorphismReport>,
    full_symmetric_group: Option<bool>,
    completely_symmetric: bool,
    completely_symmetric_with_periods: bool,
    period_models: xover_core::evaluation::PeriodComparison,
}

fn factorial(t: usize) -> Option<usize> {
    (1..=t).try_fold(1usize, |acc, x| acc.checked_mul(x))
}

pub fn check(a: &CheckArgs) -> Result<()> {
    let d = load(&a.design)?;
    let automorphisms = match (&d, a.skip_automorphisms) {
        (Loaded::Exact(e), false) => Some(automorphism_group(e)?),
        _ => None,
    };
    let full = automorphisms.as_ref().map(|g| factorial(d.t()) == Some(g.order));
    let plain = info_phi(&info_xi_design(d.as_ref()))?.matrix;
    let periods = info_phi_periods(&info_theta_design(d.as_ref()))?.matrix;
    let balance = check_strong_balance(d.as_ref());
    let report = CheckReport {
        k: d.k(),
        t: d.t(),
        n: d.size(),
        strong_balance: balance,
        strongly_balanced: balance.balanced(),
        automorphisms,
        full_symmetric_group: full,
        completely_symmetric: is_completely_symmetric(&plain, default_symmetry_tol(&plain)),
        completely_symmetric_with_periods: is_completely_symmetric(&periods, default_symmetry_tol(&periods)),
        period_models: compare_period_models(d.as_ref())?,
    };
    let text = match a.format {
        Format::Json => to_json(&report)?,
        Format::Table | Format::Csv => {
            let group = match (&report.automorphisms, &d) {
                (Some(g), _) => format!(
                    "order {}{}, transitive {}, doubly transitive {}",
                    g.order,
                    if report.full_symmetric_group == Some(true) { " (all permutations)" } else { "" },
                    yes(g.transitive),
                    yes(g.doubly_transitive)
                ),
                (None, Loaded::Approximate(_)) => "not computed for approximate designs".into(),
                (None, Loaded::Exact(_)) => "skipped".into(),
            };
            let b = &report.strong_balance;
            let cmp = &report.period_models;
            let rows = vec![
                vec!["design".into(), format!("{}, n = {}, k = {}, t = {}", d.kind(), report.n, report.k, report.t)],
                vec![
                    "strongly balanced".into(),
                    format!(
                        "{} (first period {}, self-preceded {}, cross-preceded {})",
                        yes(report.strongly_balanced),
                        yes(b.first_period),
                        yes(b.self_preceded),
                        yes(b.cross_preceded)
                    ),
                ],
                vec!["automorphism group".into(), group],
                vec!["completely symmetric".into(), yes(report.completely_symmetric)],
                vec!["completely symmetric, periods".into(), yes(report.completely_symmetric_with_periods)],
                vec![
                    "period models equal".into(),
                    format!(
                        "{} (trace {:.6} vs {:.6}, max difference {:.1e})",
                        yes(cmp.equal),
                        cmp.trace_plain,
                        cmp.trace_periods,
                        cmp.max_difference
                    ),
                ],
            ];
            if a.format == Format::Csv {
                csv(&rows.iter().map(|r| vec![r[0].clone(), format!("\"{}\"", r[1])]).collect::<Vec<_>>())
            } else {
                aligned_pairs(&rows)
            }
        }
    };
    emit(a.output.as_deref(), &text)
}
