//! Sequence and weight file formats, and CSV export of `ω` tables.
//!
//! Sequence files are either `j,logM` lines (`#` comments, `j` running
//! 0, 1, 2, ...) or a JSON document `{"label": ..., "log_values": [...]}`.
//! Weight files are `t,omega` lines with `t` strictly increasing; a
//! `t,omega` header row is allowed.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sequence::WeightSequence;
use crate::weight::Weight;

#[derive(Deserialize)]
struct SequenceDoc {
    label: Option<String>,
    log_values: Vec<f64>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Numeric `(a, b)` rows; a first row that does not parse is taken as a
/// header when `header` names its fields.
fn pairs(text: &str, header: (&str, &str)) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    for (i, rec) in reader(text).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 fields, got {}", rec.len()),
            });
        }
        if out.is_empty()
            && i == 0
            && rec[0].eq_ignore_ascii_case(header.0)
            && rec[1].eq_ignore_ascii_case(header.1)
        {
            continue;
        }
        let num = |k: usize| {
            rec[k].parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("`{}` is not a number", &rec[k]),
            })
        };
        out.push((line, num(0)?, num(1)?));
    }
    Ok(out)
}

pub fn parse_sequence(label: &str, text: &str) -> Result<WeightSequence> {
    if text.trim_start().starts_with('{') {
        let doc: SequenceDoc = serde_json::from_str(text)?;
        return WeightSequence::new(
            doc.label.unwrap_or_else(|| label.to_string()),
            doc.log_values,
        );
    }
    let mut values = Vec::new();
    for (line, j, lm) in pairs(text, ("j", "logM"))? {
        if j != values.len() as f64 {
            return Err(Error::Parse {
                line,
                msg: format!("expected j = {}, got {j}", values.len()),
            });
        }
        if !lm.is_finite() {
            return Err(Error::Parse {
                line,
                msg: "logM is not finite".into(),
            });
        }
        values.push(lm);
    }
    WeightSequence::new(label, values)
}

pub fn read_sequence(path: &Path) -> Result<WeightSequence> {
    let text = std::fs::read_to_string(path)?;
    parse_sequence(&path.display().to_string(), &text)
}

pub fn write_sequence(m: &WeightSequence, mut out: impl Write) -> Result<()> {
    writeln!(out, "# {}", m.label)?;
    for (j, lm) in m.log_values().iter().enumerate() {
        writeln!(out, "{j},{lm:.17e}")?;
    }
    Ok(())
}

pub fn parse_weight(label: &str, text: &str) -> Result<Weight> {
    let rows = pairs(text, ("t", "omega"))?;
    let t: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let om: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Weight::tabulated(label, &t, &om)
}

pub fn read_weight(path: &Path) -> Result<Weight> {
    let text = std::fs::read_to_string(path)?;
    parse_weight(&path.display().to_string(), &text)
}

/// `t,omega` rows at the given log-points; points outside the weight's
/// domain are skipped.
pub fn write_omega_table(w: &Weight, log_points: &[f64], out: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["t", "omega"])?;
    for &s in log_points {
        if let Ok(om) = w.omega(s.exp()) {
            wr.write_record([format!("{:.17e}", s.exp()), format!("{om:.17e}")])?;
        }
    }
    wr.flush()?;
    Ok(())
}
