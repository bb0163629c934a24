//! File formats: exact designs as CSV, approximate designs as JSON.
//!
//! An exact design is a CSV of labels in `1..=t` with one row per subject
//! and one column per period, optionally headed `p1,…,pk`. The transposed
//! layout has one row per period and one column per subject. An approximate
//! design is a JSON object `{"k", "t", "proportions": {sequence: weight}}`
//! keyed by canonical sequence strings, with an optional nominal size `n`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::design::{ApproximateDesign, ExactDesign, TreatmentSequence};
use crate::error::{Error, Result};

/// Reads an exact design. `t` defaults to the largest label present.
pub fn read_exact_design<R: Read>(reader: R, t: Option<usize>, transpose: bool) -> Result<ExactDesign> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(false).from_reader(reader);
    let mut table: Vec<Vec<usize>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<usize>, _> = rec.iter().map(str::parse::<usize>).collect();
        match parsed {
            Ok(row) => table.push(row),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Parse(format!("non-integer entry in CSV record {}", i + 1))),
        }
    }
    if table.is_empty() {
        return Err(Error::EmptyDesign);
    }
    let rows = if transpose {
        let cols = table[0].len();
        (0..cols).map(|c| table.iter().map(|r| r[c]).collect()).collect()
    } else {
        table
    };
    let t = match t {
        Some(t) => t,
        None => rows.iter().flatten().copied().max().unwrap_or(0).max(2),
    };
    ExactDesign::from_rows(rows, t)
}

/// Writes an exact design with a `p1,…,pk` header (omitted when transposed).
pub fn write_exact_design<W: Write>(writer: W, d: &ExactDesign, transpose: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if transpose {
        for j in 0..d.k() {
            w.write_record(d.rows().iter().map(|s| s.entries()[j].to_string()))?;
        }
    } else {
        w.write_record((1..=d.k()).map(|j| format!("p{j}")))?;
        for s in d.rows() {
            w.write_record(s.entries().iter().map(usize::to_string))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ApproximateFile {
    k: usize,
    t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    proportions: BTreeMap<String, f64>,
}

/// Reads an approximate design from JSON.
pub fn read_approximate_design<R: Read>(reader: R) -> Result<ApproximateDesign> {
    let file: ApproximateFile = serde_json::from_reader(reader)?;
    let seqs = file
        .proportions
        .iter()
        .map(|(s, &p)| Ok((TreatmentSequence::parse(s, file.t)?, p)))
        .collect::<Result<Vec<_>>>()?;
    let d = ApproximateDesign::new(seqs)?;
    if d.k() != file.k {
        return Err(Error::Inconsistent(format!("file declares k={} but sequences have {} periods", file.k, d.k())));
    }
    Ok(match file.n {
        Some(n) => d.with_nominal_n(n),
        None => d,
    })
}

/// Writes an approximate design as JSON.
pub fn write_approximate_design<W: Write>(writer: W, d: &ApproximateDesign) -> Result<()> {
    let file = ApproximateFile {
        k: d.k(),
        t: d.t(),
        n: (d.nominal_n() != 1.0).then_some(d.nominal_n()),
        proportions: d.proportions().iter().map(|(s, &p)| (s.canonical_string(), p)).collect(),
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design() -> ExactDesign {
        ExactDesign::from_rows(vec![vec![1, 2, 2], vec![2, 1, 3], vec![3, 3, 1]], 3).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        for transpose in [false, true] {
            let mut buf = Vec::new();
            write_exact_design(&mut buf, &design(), transpose).unwrap();
            let back = read_exact_design(buf.as_slice(), Some(3), transpose).unwrap();
            assert_eq!(back, design());
        }
    }

    #[test]
    fn header_is_optional() {
        let with = read_exact_design("p1,p2,p3\n1,2,2\n2,1,3\n3,3,1\n".as_bytes(), None, false).unwrap();
        let without = read_exact_design("1,2,2\n2,1,3\n3,3,1\n".as_bytes(), None, false).unwrap();
        assert_eq!(with, without);
        assert_eq!(with.t(), 3);
    }

    #[test]
    fn period_by_subject_layout_is_transposed() {
        let d = read_exact_design("1,2,3\n2,1,3\n2,3,1\n".as_bytes(), None, true).unwrap();
        assert_eq!(d, design());
    }

    #[test]
    fn bad_entries_rejected() {
        assert!(read_exact_design("1,2\n1,x\n".as_bytes(), None, false).is_err());
        assert!(read_exact_design("1,2\n1,3\n".as_bytes(), Some(2), false).is_err());
        assert!(read_exact_design("".as_bytes(), None, false).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = ApproximateDesign::new([
            (TreatmentSequence::parse("112", 3).unwrap(), 1.0 / 3.0),
            (TreatmentSequence::parse("122", 3).unwrap(), 2.0 / 3.0),
        ])
        .unwrap();
        for d in [d.clone(), d.with_nominal_n(36.0)] {
            let mut buf = Vec::new();
            write_approximate_design(&mut buf, &d).unwrap();
            let back = read_approximate_design(buf.as_slice()).unwrap();
            assert_eq!(back, d);
        }
        let text = r#"{"k": 2, "t": 2, "proportions": {"12": 0.5, "21": 0.5}}"#;
        assert_eq!(read_approximate_design(text.as_bytes()).unwrap().k(), 2);
        let wrong = r#"{"k": 3, "t": 2, "proportions": {"12": 1.0}}"#;
        assert!(read_approximate_design(wrong.as_bytes()).is_err());
    }
}
