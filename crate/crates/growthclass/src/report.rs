//! Deterministic output: JSON with every float at 17 significant digits,
//! and flat CSV rows for verdict trees.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::verdict::Verdict;

/// Pretty JSON whose floats are written as `{:.16e}`. Non-finite values
/// come out as `null`, as serde_json does for them anyway.
struct Fixed<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Fixed(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// One row per node of the verdict tree: path, relation, state, witnesses
/// as `k=v` pairs, note.
pub fn verdict_rows(v: &Verdict) -> Vec<[String; 5]> {
    fn walk(v: &Verdict, path: String, out: &mut Vec<[String; 5]>) {
        let w = v
            .witnesses
            .iter()
            .map(|(k, x)| format!("{k}={}", fmt_f64(*x)))
            .collect::<Vec<_>>()
            .join(";");
        out.push([
            path.clone(),
            v.relation.clone(),
            v.state.to_string(),
            w,
            v.note.clone(),
        ]);
        for (i, s) in v.sides.iter().enumerate() {
            walk(s, format!("{path}.{i}"), out);
        }
    }
    let mut out = Vec::new();
    walk(v, "0".into(), &mut out);
    out
}

pub fn write_verdicts_csv(vs: &[Verdict], out: impl Write) -> crate::Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["path", "relation", "state", "witnesses", "note"])?;
    for (i, v) in vs.iter().enumerate() {
        for mut row in verdict_rows(v) {
            row[0] = format!("{i}{}", &row[0][1..]);
            wr.write_record(&row)?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_fixed_digits() {
        let v = Verdict::holds("r")
            .with_witness("C", 0.1)
            .with_witness("n", f64::NAN);
        let s = to_json(&v);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["witnesses"]["C"].as_f64(), Some(0.1));
        assert_eq!(to_json(&v), s);
    }

    #[test]
    fn csv_rows_walk_sides() {
        let v = Verdict::holds("top").with_sides(vec![
            Verdict::fails("a").with_note("x, y"),
            Verdict::holds("b"),
        ]);
        let mut buf = Vec::new();
        write_verdicts_csv(&[v], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("0.0,a,Fails,,\"x, y\""), "{text}");
    }
}
