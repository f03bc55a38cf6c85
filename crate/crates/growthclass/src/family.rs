//! Text names for sequences and weights, as used on the command line and
//! in space specs.
//!
//! Sequences: `gevrey:s`, `q_gevrey:q`, `file:path`, products `a*b` and
//! mixtures `(a+b)/2` (the labels the battery produces). Weights: `exp:a`,
//! `poly:k`, `table:path`, or any sequence name for its associated weight.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::sequence::WeightSequence;
use crate::weight::Weight;

#[derive(Clone, Debug)]
pub enum Source {
    Sequence(WeightSequence),
    Weight(Weight),
}

impl Source {
    pub fn label(&self) -> &str {
        match self {
            Source::Sequence(m) => &m.label,
            Source::Weight(w) => w.label(),
        }
    }

    pub fn weight(&self) -> Weight {
        match self {
            Source::Sequence(m) => Weight::from_sequence(m.clone()),
            Source::Weight(w) => w.clone(),
        }
    }

    pub fn as_sequence(&self) -> Option<&WeightSequence> {
        match self {
            Source::Sequence(m) => Some(m),
            Source::Weight(_) => None,
        }
    }
}

fn number(name: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite() && *x > 0.0)
        .ok_or_else(|| {
            Error::UnknownFamily(format!("{name}:{v} (parameter must be a positive number)"))
        })
}

/// Split at `sep` occurring outside parentheses.
fn split_top(s: &str, sep: char) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

pub fn parse_sequence(text: &str, j_max: usize) -> Result<WeightSequence> {
    let s = text.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(")/2")) {
        if let Some((a, b)) = split_top(inner, '+') {
            return Ok(parse_sequence(a, j_max)?.mixture(&parse_sequence(b, j_max)?));
        }
    }
    if let Some((a, b)) = split_top(s, '*') {
        return Ok(parse_sequence(a, j_max)?.product(&parse_sequence(b, j_max)?));
    }
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| Error::UnknownFamily(s.to_string()))?;
    match kind {
        "gevrey" => Ok(WeightSequence::gevrey(number(kind, arg)?, j_max)),
        "q_gevrey" => {
            let q = number(kind, arg)?;
            if q <= 1.0 {
                return Err(Error::UnknownFamily(format!("{s} (q must exceed 1)")));
            }
            Ok(WeightSequence::q_gevrey(q, j_max))
        }
        "file" => io::read_sequence(Path::new(arg)),
        _ => Err(Error::UnknownFamily(s.to_string())),
    }
}

pub fn parse_source(text: &str, j_max: usize) -> Result<Source> {
    let s = text.trim();
    if let Some((kind, arg)) = s.split_once(':') {
        match kind {
            "exp" => return Ok(Source::Weight(Weight::exp(number(kind, arg)?)?)),
            "poly" => return Ok(Source::Weight(Weight::poly(number(kind, arg)?)?)),
            "table" => return Ok(Source::Weight(io::read_weight(Path::new(arg))?)),
            _ => {}
        }
    }
    parse_sequence(s, j_max).map(Source::Sequence)
}

pub fn parse_weight(text: &str, j_max: usize) -> Result<Weight> {
    parse_source(text, j_max).map(|s| s.weight())
}
