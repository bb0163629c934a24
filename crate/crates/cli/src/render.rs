//! Text rendering of numbers and aligned tables.

use xover_core::scalar::format_rational;
use xover_core::Rational;

/// Width of the band next to 0 and 1 shown as `0⁺` and `1⁻`.
const BAND: f64 = 0.005;
/// Values this close to 0 or 1 print as the bound itself.
const EXACT_BOUND: f64 = 1e-9;

/// A proportion or efficiency to two decimals, with `0⁺` and `1⁻` for values
/// strictly inside the rounding band next to the bounds.
pub fn rounded(x: f64) -> String {
    if x.abs() <= EXACT_BOUND {
        "0".into()
    } else if (x - 1.0).abs() <= EXACT_BOUND {
        "1".into()
    } else if x > 0.0 && x < BAND {
        "0⁺".into()
    } else if x < 1.0 && x > 1.0 - BAND {
        "1⁻".into()
    } else {
        format!("{x:.2}")
    }
}

/// The exact fraction when available, else [`rounded`].
pub fn proportion(x: f64, exact: Option<&Rational>) -> String {
    exact.map_or_else(|| rounded(x), format_rational)
}

/// `h*` as an exact fraction when available, else two decimals.
pub fn h_value(x: f64, exact: Option<&Rational>) -> String {
    exact.map_or_else(|| format!("{x:.2}"), format_rational)
}

/// Left-aligned first column, right-aligned remaining columns.
pub fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let pad = widths[j] - c.chars().count();
                if j == 0 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Comma-separated rows.
pub fn csv(rows: &[Vec<String>]) -> String {
    rows.iter().map(|r| r.join(",") + "\n").collect()
}
