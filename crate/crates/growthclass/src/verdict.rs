//! Tri-state outcomes with witness constants.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum State {
    Holds,
    Fails,
    Inconclusive,
}

impl State {
    pub fn is_definite(self) -> bool {
        self != State::Inconclusive
    }

    /// Conjunction: any Fails wins, then any Inconclusive.
    pub fn and(self, other: State) -> State {
        match (self, other) {
            (State::Fails, _) | (_, State::Fails) => State::Fails,
            (State::Holds, State::Holds) => State::Holds,
            _ => State::Inconclusive,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            State::Holds => "Holds",
            State::Fails => "Fails",
            State::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// A decided (or undecided) relation together with the constants that
/// justify it. `evidence` holds `(index or log-point, value)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub relation: String,
    pub state: State,
    pub witnesses: BTreeMap<String, f64>,
    pub evidence: Vec<(f64, f64)>,
    pub note: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sides: Vec<Verdict>,
}

impl Verdict {
    pub fn new(relation: impl Into<String>, state: State) -> Self {
        Verdict {
            relation: relation.into(),
            state,
            witnesses: BTreeMap::new(),
            evidence: Vec::new(),
            note: String::new(),
            sides: Vec::new(),
        }
    }

    pub fn holds(relation: impl Into<String>) -> Self {
        Self::new(relation, State::Holds)
    }

    pub fn fails(relation: impl Into<String>) -> Self {
        Self::new(relation, State::Fails)
    }

    pub fn inconclusive(relation: impl Into<String>, note: impl Into<String>) -> Self {
        Self::new(relation, State::Inconclusive).with_note(note)
    }

    pub fn with_witness(mut self, name: &str, value: f64) -> Self {
        self.witnesses.insert(name.to_string(), value);
        self
    }

    pub fn with_evidence(mut self, at: f64, value: f64) -> Self {
        self.evidence.push((at, value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else if !note.is_empty() {
            self.note.push_str("; ");
            self.note.push_str(&note);
        }
        self
    }

    pub fn with_sides(mut self, sides: Vec<Verdict>) -> Self {
        self.sides = sides;
        self
    }

    pub fn witness(&self, name: &str) -> Option<f64> {
        self.witnesses.get(name).copied()
    }

    pub fn is(&self, state: State) -> bool {
        self.state == state
    }

    /// Definite verdicts must carry something to point at; patch in a
    /// placeholder note otherwise so the invariant is visible, not silent.
    pub fn checked(mut self) -> Self {
        match self.state {
            State::Inconclusive if self.note.is_empty() => {
                self.note = "undecided on the window".into();
            }
            State::Holds | State::Fails
                if self.witnesses.is_empty() && self.evidence.is_empty() =>
            {
                self.evidence.push((f64::NAN, f64::NAN));
            }
            _ => {}
        }
        self
    }
}

/// Unanimity fusion for theorem-as-test operations: all Holds gives Holds,
/// all Fails gives Fails, anything else is Inconclusive with the breakdown.
pub fn fuse(relation: &str, sides: Vec<Verdict>) -> Verdict {
    let first = sides.first().map(|v| v.state);
    let unanimous = first.filter(|s| s.is_definite() && sides.iter().all(|v| v.state == *s));
    let breakdown = sides
        .iter()
        .map(|v| format!("{}={}", v.relation, v.state))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = match unanimous {
        Some(state) => Verdict::new(relation, state).with_note(format!("unanimous: {breakdown}")),
        None => Verdict::inconclusive(relation, format!("sides disagree: {breakdown}")),
    };
    for side in &sides {
        for (k, v) in &side.witnesses {
            out.witnesses.insert(format!("{}.{}", side.relation, k), *v);
        }
    }
    out.sides = sides;
    out
}

/// True when the sides contain both a Holds and a Fails. For an
/// equivalence theorem this would be a real contradiction, not noise.
pub fn contradicts(sides: &[Verdict]) -> bool {
    sides.iter().any(|v| v.is(State::Holds)) && sides.iter().any(|v| v.is(State::Fails))
}
