//! Weighted spaces of entire functions as symbolic specs. Inclusions are
//! decided by routing to the matching characterization after its
//! preconditions have been checked; membership and norms are estimated for
//! truncated power series.
//!
//! Conventions: `H_v` holds `f` with `|f| v` bounded (`H⁰_v`: tending to
//! 0). With `v_c(t) = v(ct)`, the inductive dilatation space is the union
//! of `H_{v_c}` over `c`, the projective one the intersection; the power
//! variants use `v^c`. Specs are written `flavor:source[:param]`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::associated::{check_om6_omega, AssociatedWeight, LogWeight};
use crate::error::{Error, Result};
use crate::family::{self, Source};
use crate::grid::Grid;
use crate::policy::Policy;
use crate::relations::{
    bridge_pow_seq, bridge_triangle_seq, omega_little_o, weight_preceq, weight_preceq_all_dila,
    weight_preceq_dila, weight_preceq_pow, weight_triangle_dila, weight_triangle_pow,
};
use crate::sequence::WeightSequence;
use crate::theta::{ThetaFunction, ThetaKind};
use crate::trend::Trend;
use crate::verdict::{fuse, State, Verdict};
use crate::weight::{tail_fit, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    Single,
    InductiveDila,
    ProjectiveDila,
    InductivePow,
    ProjectivePow,
}

impl Kind {
    fn is_pow(self) -> bool {
        matches!(self, Kind::InductivePow | Kind::ProjectivePow)
    }

    fn is_inductive(self) -> bool {
        matches!(self, Kind::InductiveDila | Kind::InductivePow)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flavor {
    pub kind: Kind,
    /// `H⁰` (vanishing) instead of `H^∞` (bounded).
    pub little_o: bool,
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (base, little_o) = match s.strip_suffix('0') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let kind = match base {
            "single" => Kind::Single,
            "ind-dila" => Kind::InductiveDila,
            "proj-dila" => Kind::ProjectiveDila,
            "ind-pow" => Kind::InductivePow,
            "proj-pow" => Kind::ProjectivePow,
            _ => return Err(Error::Routing(format!("unknown space flavor `{s}`"))),
        };
        Ok(Flavor { kind, little_o })
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.kind {
            Kind::Single => "single",
            Kind::InductiveDila => "ind-dila",
            Kind::ProjectiveDila => "proj-dila",
            Kind::InductivePow => "ind-pow",
            Kind::ProjectivePow => "proj-pow",
        };
        write!(f, "{base}{}", if self.little_o { "0" } else { "" })
    }
}

#[derive(Clone, Debug)]
pub struct SpaceSpec {
    pub source: Source,
    pub flavor: Flavor,
    /// Dilatation of the weight of a single space, `v(ct)`.
    pub param: Option<f64>,
}

impl SpaceSpec {
    pub fn new(source: Source, flavor: Flavor, param: Option<f64>) -> Result<Self> {
        if let Some(c) = param {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Routing(format!(
                    "space parameter {c} must be positive"
                )));
            }
            if flavor.kind != Kind::Single {
                return Err(Error::Routing(
                    "a parameter only applies to single spaces".into(),
                ));
            }
        }
        Ok(SpaceSpec {
            source,
            flavor,
            param,
        })
    }

    /// `flavor:source[:param]`; the source is parsed whole first, so a
    /// trailing number is read as the parameter only when it has to be.
    pub fn parse(text: &str, j_max: usize) -> Result<Self> {
        let (fl, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Routing(format!("space spec `{text}` needs flavor:source")))?;
        let flavor: Flavor = fl.parse()?;
        match family::parse_source(rest, j_max) {
            Ok(src) => SpaceSpec::new(src, flavor, None),
            Err(first) => {
                let Some((src, p)) = rest.rsplit_once(':') else {
                    return Err(first);
                };
                let Ok(c) = p.parse::<f64>() else {
                    return Err(first);
                };
                SpaceSpec::new(family::parse_source(src, j_max)?, flavor, Some(c))
            }
        }
    }

    /// The single-space weight, or the base weight of a system.
    pub fn weight(&self) -> Weight {
        let w = self.source.weight();
        match self.param {
            Some(c) => w.dilate(c).expect("positive parameter"),
            None => w,
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.flavor, self.source.label())?;
        if let Some(c) = self.param {
            write!(f, ":{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionVerdict {
    pub verdict: Verdict,
    pub theorem_tag: String,
    pub sides: Vec<Verdict>,
    /// Machine-checked preconditions of the routed result.
    pub preconditions: Vec<Verdict>,
}

impl InclusionVerdict {
    pub fn state(&self) -> State {
        self.verdict.state
    }

    fn routed(tag: &str, verdict: Verdict, preconditions: Vec<Verdict>) -> Self {
        let sides = if verdict.sides.is_empty() {
            vec![verdict.clone()]
        } else {
            verdict.sides.clone()
        };
        InclusionVerdict {
            verdict,
            theorem_tag: tag.into(),
            sides,
            preconditions,
        }
    }

    fn unmet(tag: &str, relation: &str, preconditions: Vec<Verdict>) -> Self {
        let names: Vec<String> = preconditions
            .iter()
            .filter(|p| !p.is(State::Holds))
            .map(|p| format!("{} is {}", p.relation, p.state))
            .collect();
        let v = Verdict::inconclusive(
            relation,
            format!("precondition unmet: {}", names.join(", ")),
        );
        InclusionVerdict {
            verdict: v,
            theorem_tag: tag.into(),
            sides: Vec::new(),
            preconditions,
        }
    }
}

fn all_hold(p: &[Verdict]) -> bool {
    p.iter().all(|v| v.is(State::Holds))
}

fn log_convex_pre(which: &str, m: &WeightSequence, policy: &Policy) -> Verdict {
    m.is_lc(policy).relabel(&format!("{which}_LC"))
}

fn normalized_pre(which: &str, w: &Weight, grid: &Grid) -> Verdict {
    let name = format!("{which}_normalized");
    let mut pts: Vec<f64> = grid.between(f64::NEG_INFINITY, 0.0).to_vec();
    pts.push(0.0);
    if w.is_normalized_node() || w.is_normalized_on(&pts) {
        Verdict::holds(name).with_witness("points", pts.len() as f64)
    } else {
        Verdict::fails(name).with_note("omega is not 0 on [0, 1]")
    }
}

fn convex_pre(which: &str, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    w.is_convex_weight(grid, policy)
        .relabel(&format!("{which}_convex"))
}

fn om6_pre(which: &str, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    w.check_om6_weight(grid, policy)
        .relabel(&format!("{which}_om6"))
}

/// `H⁰` systems are rewritten to `H^∞`. Power systems always coincide;
/// dilatation systems need `ω(dt) - ω(ct) -> ∞` for some `d > c`, which a
/// sequence weight has since `ω_M(2t) - ω_M(t) >= Σ_M(t) log 2`.
fn collapse_gate(which: &str, s: &SpaceSpec, grid: &Grid, policy: &Policy) -> Verdict {
    let name = format!("{which}_o_collapse");
    if s.flavor.kind.is_pow() {
        return Verdict::holds(name).with_note("power systems: o and O classes coincide");
    }
    if matches!(s.source, Source::Sequence(_)) {
        return Verdict::holds(name).with_note("sequence weight: counting function diverges");
    }
    let w = s.weight();
    let om6 = w.check_om6_weight(grid, policy);
    let Some(h) = om6.witness("H").filter(|_| om6.is(State::Holds)) else {
        return Verdict::inconclusive(name, "(om6) not certified, strong ratio gate unavailable");
    };
    w.strong_ratio_check(1.0, 2.0 * h, grid, policy)
        .relabel(&name)
}

/// Decide `A ⊆ B`.
pub fn decide_inclusion(
    a: &SpaceSpec,
    b: &SpaceSpec,
    grid: &Grid,
    policy: &Policy,
) -> Result<InclusionVerdict> {
    let rel = format!("{a} <= {b}");
    if a.to_string() == b.to_string() {
        let v = Verdict::holds(&rel)
            .with_witness("C", 1.0)
            .with_note("same space");
        return Ok(InclusionVerdict::routed("reflexive", v, Vec::new()));
    }
    let (ka, kb) = (a.flavor.kind, b.flavor.kind);
    if ka == Kind::Single || kb == Kind::Single {
        if ka != kb {
            return Err(Error::Routing(format!(
                "single space against a system: {rel}"
            )));
        }
        if a.flavor.little_o != b.flavor.little_o {
            return Err(Error::Routing(format!(
                "mixed o and O single spaces: {rel}"
            )));
        }
        return Ok(decide_single(a, b, &rel, grid, policy));
    }

    let mut pre = Vec::new();
    for (which, s) in [("left", a), ("right", b)] {
        if s.flavor.little_o {
            pre.push(collapse_gate(which, s, grid, policy));
        }
        if s.flavor.kind.is_pow() {
            pre.push(normalized_pre(which, &s.weight(), grid));
        }
    }
    let (va, vb) = (a.weight(), b.weight());
    let same_source = a.source.label() == b.source.label();
    let seqs = match (&a.source, &b.source) {
        (Source::Sequence(m), Source::Sequence(n)) => Some((m, n)),
        _ => None,
    };
    let seq_pre = |pre: &mut Vec<Verdict>| {
        if let Some((m, n)) = seqs {
            pre.push(log_convex_pre("left", m, policy));
            if !same_source {
                pre.push(log_convex_pre("right", n, policy));
            }
        }
    };

    use Kind::*;
    let (tag, run): (&str, Box<dyn Fn() -> Verdict>) = match (ka, kb) {
        _ if same_source
            && ka.is_inductive() == kb.is_inductive()
            && ka.is_pow() != kb.is_pow() =>
        {
            seq_pre(&mut pre);
            // dilatation into power needs (om1); power into dilatation (om6) = (mg)
            let dila_into_pow = !ka.is_pow();
            match (seqs, dila_into_pow) {
                (Some((m, _)), true) => (
                    "same-sequence/om1",
                    Box::new(move || m.check_om1_index(policy)),
                ),
                (Some((m, _)), false) => ("same-sequence/mg", Box::new(move || m.check_mg(policy))),
                (None, true) => (
                    "same-weight/om1",
                    Box::new(|| va.check_om1_weight(grid, policy)),
                ),
                (None, false) => (
                    "same-weight/om6",
                    Box::new(|| va.check_om6_weight(grid, policy)),
                ),
            }
        }
        (InductiveDila, ProjectiveDila) => match seqs {
            Some((n, m)) => {
                seq_pre(&mut pre);
                (
                    "dila-sequence/strong-triangle",
                    Box::new(move || bridge_triangle_seq(m, n, grid, policy)),
                )
            }
            None => {
                let ub = convex_pre("right", &vb, grid, policy);
                let ua = convex_pre("left", &va, grid, policy);
                let ob = om6_pre("right", &vb, grid, policy);
                let oa = om6_pre("left", &va, grid, policy);
                let regime1 = ub.is(State::Holds) && ob.is(State::Holds);
                let regime2 = ub.is(State::Holds)
                    && ua.is(State::Holds)
                    && (oa.is(State::Holds) || ob.is(State::Holds));
                let gate = if regime1 || regime2 {
                    Verdict::holds("weight_system_regime")
                        .with_witness("regime", if regime1 { 1.0 } else { 2.0 })
                } else {
                    Verdict::inconclusive(
                        "weight_system_regime",
                        "needs a convex (om6) target, or both convex with one (om6)",
                    )
                };
                pre.extend([ub, ua, ob, oa]);
                pre.retain(|p| {
                    !p.relation.ends_with("_convex") && !p.relation.ends_with("_om6")
                        || p.is(State::Holds)
                });
                pre.push(gate);
                (
                    "dila-weight/strong-triangle",
                    Box::new(|| {
                        fuse(
                            "weight_dila_inclusion",
                            vec![
                                weight_preceq_all_dila(&va, &vb, grid, policy),
                                weight_triangle_dila(&va, &vb, grid, policy),
                            ],
                        )
                    }),
                )
            }
        },
        (InductivePow, ProjectivePow) => match seqs {
            Some((n, m)) => {
                seq_pre(&mut pre);
                (
                    "pow-sequence/tilde",
                    Box::new(move || bridge_pow_seq(m, n, grid, policy)),
                )
            }
            None => {
                pre.push(convex_pre("right", &vb, grid, policy));
                (
                    "pow-weight/strong-triangle",
                    Box::new(|| {
                        fuse(
                            "weight_pow_inclusion",
                            vec![
                                weight_triangle_pow(&va, &vb, grid, policy),
                                omega_little_o(&va, &vb, grid, policy),
                            ],
                        )
                    }),
                )
            }
        },
        (InductiveDila, InductiveDila) | (ProjectiveDila, ProjectiveDila) => match seqs {
            // ω_A(t) <= ω_B(ct) + C for some c, i.e. B_j <= C c^j A_j
            Some((m, n)) => {
                seq_pre(&mut pre);
                (
                    "dila-sequence/preceq",
                    Box::new(|| {
                        fuse(
                            "dila_preceq",
                            vec![
                                n.seq_preceq(m, policy),
                                weight_preceq_dila(&va, &vb, grid, policy),
                            ],
                        )
                    }),
                )
            }
            None => (
                "dila-weight/preceq",
                Box::new(|| weight_preceq_dila(&va, &vb, grid, policy)),
            ),
        },
        (InductivePow, InductivePow) | (ProjectivePow, ProjectivePow) => {
            seq_pre(&mut pre);
            (
                "pow/preceq",
                Box::new(|| weight_preceq_pow(&va, &vb, grid, policy)),
            )
        }
        _ => return Err(Error::Routing(format!("no characterization for {rel}"))),
    };
    if !all_hold(&pre) {
        return Ok(InclusionVerdict::unmet(tag, &rel, pre));
    }
    let r = run();
    let mut v = Verdict::new(&rel, r.state).with_note(r.note.clone());
    v.witnesses = r.witnesses.clone();
    v.evidence = r.evidence.clone();
    v.sides = if r.sides.is_empty() { vec![r] } else { r.sides };
    Ok(InclusionVerdict::routed(tag, v.checked(), pre))
}

fn decide_single(
    a: &SpaceSpec,
    b: &SpaceSpec,
    rel: &str,
    grid: &Grid,
    policy: &Policy,
) -> InclusionVerdict {
    let o = if a.flavor.little_o {
        "single0"
    } else {
        "single"
    };
    if let (Source::Sequence(m), Source::Sequence(n)) = (&a.source, &b.source) {
        // v_{M,c} is the weight of c^{-j} M_j; v_M only sees the minorant
        let eff = |s: &WeightSequence, p: Option<f64>| {
            let lc = s.log_convex_minorant();
            p.map_or(lc.clone(), |c| lc.scale_pow(c))
        };
        let (me, ne) = (eff(m, a.param), eff(n, b.param));
        let r = ne.bounded_by(&me, policy);
        let pre = vec![
            m.is_log_convex()
                .relabel("left_log_convex")
                .with_note("a non-log-convex side is replaced by its minorant"),
            n.is_log_convex()
                .relabel("right_log_convex")
                .with_note("a non-log-convex side is replaced by its minorant"),
        ];
        let mut v = Verdict::new(rel, r.state).with_note(r.note.clone());
        v.witnesses = r.witnesses.clone();
        v.evidence = r.evidence.clone();
        v.sides = vec![r];
        // the paper-side preconditions here are informational only
        return InclusionVerdict {
            verdict: v.checked(),
            theorem_tag: format!("{o}/sequence-bound"),
            sides: Vec::new(),
            preconditions: pre,
        }
        .with_sides_from_verdict();
    }
    let (u, w) = (a.weight(), b.weight());
    let tag = format!("{o}/essential-weight");
    let ess = match &a.source {
        Source::Sequence(_) => {
            Verdict::holds("left_essential").with_note("sequence weights are essential")
        }
        Source::Weight(_) => {
            let c = u.is_convex_weight(grid, policy);
            if c.is(State::Holds) {
                Verdict::holds("left_essential")
                    .with_note("convex weight equals the weight of its associated sequence")
            } else {
                Verdict::inconclusive(
                    "left_essential",
                    "essentialness only known for convex or sequence weights",
                )
            }
        }
    };
    if !ess.is(State::Holds) {
        return InclusionVerdict::unmet(&tag, rel, vec![ess]);
    }
    let r = weight_preceq(&u, &w, grid, policy);
    let mut v = Verdict::new(rel, r.state).with_note(r.note.clone());
    v.witnesses = r.witnesses.clone();
    v.evidence = r.evidence.clone();
    v.sides = vec![r];
    InclusionVerdict {
        verdict: v.checked(),
        theorem_tag: tag,
        sides: Vec::new(),
        preconditions: vec![ess],
    }
    .with_sides_from_verdict()
}

impl InclusionVerdict {
    fn with_sides_from_verdict(mut self) -> Self {
        self.sides = self.verdict.sides.clone();
        self
    }
}

/// Dilatation and power systems of `M` coincide iff `M` has the index
/// condition (om1) and (mg). `M` must be a weight sequence in the LC sense.
pub fn system_equiv(m: &WeightSequence, grid: &Grid, policy: &Policy) -> Result<InclusionVerdict> {
    let lc = m.is_lc(policy);
    let tag = "same-sequence/dila-pow-equality";
    match lc.state {
        State::Fails => {
            return Err(Error::Routing(format!(
                "{} is not a weight sequence: {}",
                m.label, lc.note
            )))
        }
        State::Inconclusive => {
            return Ok(InclusionVerdict::unmet(
                tag,
                "system_equiv",
                vec![lc.relabel("LC")],
            ))
        }
        State::Holds => {}
    }
    let om1 = m.check_om1_index(policy);
    let mg = m.check_mg(policy);
    let om6 = check_om6_omega(&AssociatedWeight::new(m.clone()), grid, policy);
    let mut v = Verdict::new("system_equiv", om1.state.and(mg.state));
    if mg.is(State::Fails) {
        v = v.with_note("(mg) fails; evidence lists (om6) violations per ladder H");
        v.evidence = om6.evidence.clone();
    } else if om1.is(State::Fails) {
        v = v.with_note("(om1) index condition fails");
        v.evidence = om1.evidence.clone();
    }
    for side in [&om1, &mg] {
        for (k, x) in &side.witnesses {
            v.witnesses.insert(format!("{}.{k}", side.relation), *x);
        }
    }
    v.sides = vec![om1, mg, om6];
    Ok(InclusionVerdict::routed(tag, v.checked(), vec![lc]))
}

/// The weight version: a normalized convex `u` has coinciding systems iff
/// `(ω₁)` and `(ω₆)`; the same conditions on `M^u` corroborate.
pub fn system_equiv_weight(
    u: &Weight,
    j_max: usize,
    grid: &Grid,
    policy: &Policy,
) -> Result<InclusionVerdict> {
    let tag = "same-weight/dila-pow-equality";
    let pre = vec![
        normalized_pre("weight", u, grid),
        convex_pre("weight", u, grid, policy),
    ];
    if !all_hold(&pre) {
        return Ok(InclusionVerdict::unmet(tag, "system_equiv_weight", pre));
    }
    let om1 = u.check_om1_weight(grid, policy);
    let om6 = u.check_om6_weight(grid, policy);
    let mut v = Verdict::new("system_equiv_weight", om1.state.and(om6.state));
    if om6.is(State::Fails) {
        v.evidence = om6.evidence.clone();
        v = v.with_note("(om6) fails");
    } else if om1.is(State::Fails) {
        v.evidence = om1.evidence.clone();
        v = v.with_note("(om1) fails");
    }
    let mut sides = vec![om1, om6];
    match u.associated_sequence(j_max, grid, policy) {
        Ok(assoc) => {
            sides.push(
                assoc
                    .seq
                    .check_om1_index(policy)
                    .relabel("associated_om1_index"),
            );
            sides.push(assoc.seq.check_mg(policy).relabel("associated_mg"));
        }
        Err(e) => sides.push(Verdict::inconclusive("associated_sequence", e.to_string())),
    }
    v.sides = sides;
    Ok(InclusionVerdict::routed(tag, v.checked(), pre))
}

/// A truncated power series by `log |a_j|`. `exact` marks a polynomial
/// (nothing past the last coefficient); otherwise the tail past the last
/// two nonzero terms is assumed to decay no slower than their ratio.
#[derive(Clone, Debug, Serialize)]
pub struct PowerSeries {
    pub label: String,
    pub log_abs_coeffs: Vec<f64>,
    /// All coefficients nonnegative, so the maximum modulus is `f(t)`.
    pub nonneg: bool,
    pub exact: bool,
}

impl PowerSeries {
    pub fn new(
        label: impl Into<String>,
        log_abs_coeffs: Vec<f64>,
        nonneg: bool,
        exact: bool,
    ) -> Result<Self> {
        if log_abs_coeffs
            .iter()
            .any(|x| x.is_nan() || *x == f64::INFINITY)
        {
            return Err(Error::InvalidWeight(
                "coefficients must be finite or -inf".into(),
            ));
        }
        if !log_abs_coeffs.iter().any(|x| x.is_finite()) {
            return Err(Error::InvalidWeight(
                "power series needs a nonzero coefficient".into(),
            ));
        }
        Ok(PowerSeries {
            label: label.into(),
            log_abs_coeffs,
            nonneg,
            exact,
        })
    }

    pub fn monomial(k: usize) -> Self {
        let mut a = vec![f64::NEG_INFINITY; k + 1];
        a[k] = 0.0;
        PowerSeries {
            label: format!("z^{k}"),
            log_abs_coeffs: a,
            nonneg: true,
            exact: true,
        }
    }

    pub fn polynomial(label: impl Into<String>, coeffs: &[f64]) -> Result<Self> {
        let la = coeffs.iter().map(|c| c.abs().ln()).collect();
        Self::new(label, la, coeffs.iter().all(|c| *c >= 0.0), true)
    }

    pub fn from_theta(th: &ThetaFunction) -> Self {
        let label = match th.kind() {
            ThetaKind::Dila(c) => format!("theta({},{c})", th.source().label),
            ThetaKind::Pow(c) => format!("theta_pow({},{c})", th.source().label),
        };
        PowerSeries {
            label,
            log_abs_coeffs: th.log_coeffs(),
            nonneg: true,
            exact: false,
        }
    }

    fn terms(&self, s: f64) -> impl Iterator<Item = f64> + '_ {
        self.log_abs_coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_finite())
            .map(move |(j, a)| a + j as f64 * s)
    }

    /// `log Σ |a_j| t^j` over the stored terms.
    pub fn log_sum(&self, s: f64) -> f64 {
        let top = self.terms(s).fold(f64::NEG_INFINITY, f64::max);
        top + self.terms(s).map(|x| (x - top).exp()).sum::<f64>().ln()
    }

    /// `max_j log(|a_j| t^j)`, a lower bound for the maximum modulus.
    pub fn log_cauchy(&self, s: f64) -> f64 {
        self.terms(s).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Upper bound for `log M(f, t)` including the geometric tail, or
    /// `None` where the tail ratio is not below 1/2.
    pub fn log_upper(&self, s: f64) -> Option<f64> {
        self.upper_from(self.log_sum(s), s)
    }

    fn upper_from(&self, sum: f64, s: f64) -> Option<f64> {
        if self.exact {
            return Some(sum);
        }
        let c = &self.log_abs_coeffs;
        let k = c.iter().rposition(|a| a.is_finite())?;
        let i = c[..k].iter().rposition(|a| a.is_finite())?;
        let (ai, ak) = (c[i], c[k]);
        let r = (ak - ai + (k - i) as f64 * s).exp();
        if r >= 0.5 {
            return None;
        }
        let last = ak + k as f64 * s;
        Some(sum + ((last - sum).exp() * r / (1.0 - r)).ln_1p())
    }

    /// Lower bound for `log M(f, t)`.
    pub fn log_lower(&self, s: f64) -> f64 {
        if self.nonneg {
            self.log_sum(s)
        } else {
            self.log_cauchy(s)
        }
    }

    /// `(log_lower, log_upper)` sharing one pass over the terms.
    fn bounds(&self, s: f64) -> (f64, Option<f64>) {
        let sum = self.log_sum(s);
        let lower = if self.nonneg { sum } else { self.log_cauchy(s) };
        (lower, self.upper_from(sum, s))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    /// Bounds on `log ‖f‖_v` over `[0, t_end]`.
    pub log_lower: f64,
    pub log_upper: f64,
    pub log_t_argmax: f64,
    pub log_t_end: f64,
    /// False when the tail or the weight near 0 could not be bounded.
    pub certified: bool,
    pub note: String,
}

/// `sup_t M(f, t) v(t)` on the grid window. The lower bound samples the
/// grid; the upper bound uses monotonicity of `M(f, ·)` and `ω` between
/// neighbouring points. Only the upper bound needs the tail certificate.
pub fn norm_estimate(f: &PowerSeries, v: &Weight, grid: &Grid) -> NormEstimate {
    let pts = v.eval_points(grid);
    let mut lower = (f64::NEG_INFINITY, f64::NAN);
    let mut upper = f64::NEG_INFINITY;
    let mut certified = true;
    let mut note = String::new();
    for (i, &s) in pts.iter().enumerate() {
        let om = v.omega_log(s);
        let lo = f.log_lower(s) - om;
        if lo > lower.0 {
            lower = (lo, s);
        }
        let next = pts.get(i + 1).copied().unwrap_or(s);
        match f.log_upper(next) {
            Some(u) => upper = upper.max(u - om),
            None => {
                certified = false;
                note = format!("tail not certified beyond log t = {s:.6}");
                break;
            }
        }
    }
    // below the first point: M(f, t) <= M(f, t_0) and ω >= ω(0)
    match (pts.first(), v.omega(0.0)) {
        (Some(&s0), Ok(w0)) => match f.log_upper(s0) {
            Some(u) => upper = upper.max(u - w0),
            None => certified = false,
        },
        _ => {
            certified = false;
            note = "weight not defined near 0".into();
        }
    }
    if !certified {
        upper = f64::INFINITY;
    }
    NormEstimate {
        log_lower: lower.0,
        log_upper: upper,
        log_t_argmax: lower.1,
        log_t_end: pts.last().copied().unwrap_or(f64::NAN),
        certified,
        note,
    }
}

/// `|f| v` bounded (or vanishing) on the certified window of `w`.
fn probe_rung(
    name: &str,
    f: &PowerSeries,
    w: &Weight,
    little_o: bool,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let mut pts = Vec::new();
    let (mut up, mut lo) = (Vec::new(), Vec::new());
    for s in w.eval_points(grid).into_iter().filter(|s| *s >= 0.0) {
        let (l, u) = f.bounds(s);
        let Some(u) = u else { break };
        let om = w.omega_log(s);
        pts.push(s);
        up.push(u - om);
        lo.push(l - om);
    }
    let fu = tail_fit(&pts, &up, 0.0, policy);
    let fl = tail_fit(&pts, &lo, 0.0, policy);
    if fu.trend == Trend::TooShort {
        return Verdict::inconclusive(name, "certified window too short");
    }
    let (holds, fails) = if little_o {
        (
            fu.trend == Trend::Falling,
            matches!(fl.trend, Trend::Flat | Trend::Rising),
        )
    } else {
        (
            matches!(fu.trend, Trend::Flat | Trend::Falling),
            fl.trend == Trend::Rising,
        )
    };
    if holds {
        Verdict::holds(name).with_witness("log_C", fu.max)
    } else if fails {
        Verdict::fails(name)
            .with_evidence(fl.argmax, fl.max)
            .with_note("|f| v grows on the window")
    } else {
        Verdict::inconclusive(
            name,
            format!("gap slopes {:.3e} / {:.3e} undecided", fu.slope, fl.slope),
        )
    }
    .with_witness("slope", fu.slope)
    .with_witness("log_t_end", pts.last().copied().unwrap_or(f64::NAN))
}

/// Whether `f` lies in the space, from the trend of `log M(f,t) - ω(t)`.
/// Polynomials are routed through rapid decrease of the base weight
/// first and tested directly only if that is not certified.
pub fn membership(f: &PowerSeries, space: &SpaceSpec, grid: &Grid, policy: &Policy) -> Verdict {
    let name = format!("{} in {space}", f.label);
    let base = space.weight();
    let mut sides = Vec::new();
    if f.exact {
        let rd = base.rapidly_decreasing(grid, policy);
        if rd.is(State::Holds) {
            return Verdict::holds(&name)
                .with_note("polynomial and rapidly decreasing weight")
                .with_sides(vec![rd]);
        }
        sides.push(rd);
    }
    let o = space.flavor.little_o;
    let fam = |c: f64| {
        match space.flavor.kind {
            Kind::InductivePow | Kind::ProjectivePow => base.power(c),
            _ => base.dilate(c),
        }
        .expect("ladder parameters are positive")
    };
    let v = match space.flavor.kind {
        Kind::Single => probe_rung(&name, f, &base, o, grid, policy),
        Kind::InductiveDila | Kind::InductivePow => {
            let mut undecided = false;
            let mut found = None;
            for &c in &policy.exists_ladder {
                let r = probe_rung("rung", f, &fam(c), o, grid, policy);
                match r.state {
                    State::Holds => {
                        found = Some(r.with_witness("c", c));
                        break;
                    }
                    State::Inconclusive => undecided = true,
                    State::Fails => {}
                }
            }
            match found {
                Some(r) => Verdict::holds(&name)
                    .with_witness("c", c_of(&r))
                    .with_sides(vec![r]),
                None if undecided => {
                    Verdict::inconclusive(&name, "no ladder rung certified, some undecided")
                }
                None => Verdict::fails(&name).with_note("no ladder parameter gives a finite norm"),
            }
        }
        Kind::ProjectiveDila | Kind::ProjectivePow => {
            let mut out = Verdict::holds(&name).with_note("finite norm on every ladder rung");
            for &c in &policy.forall_ladder {
                let r = probe_rung("rung", f, &fam(c), o, grid, policy);
                match r.state {
                    State::Holds => continue,
                    State::Fails => {
                        out = Verdict::fails(&name)
                            .with_witness("c", c)
                            .with_note(format!("unbounded for c = {c}"));
                        out.evidence = r.evidence.clone();
                        break;
                    }
                    State::Inconclusive => {
                        out = Verdict::inconclusive(&name, format!("rung {c}: {}", r.note));
                    }
                }
            }
            out
        }
    };
    sides.extend(v.sides.clone());
    let mut v = v;
    v.sides = sides;
    v.checked()
}

fn c_of(r: &Verdict) -> f64 {
    r.witness("c").unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn setup() -> (Grid, Policy) {
        (Grid::geometric(&GridSpec::default()), Policy::default())
    }

    fn spec(s: &str) -> SpaceSpec {
        SpaceSpec::parse(s, 512).unwrap()
    }

    #[test]
    fn parse_specs() {
        let s = spec("single:gevrey:1:2");
        assert_eq!(s.param, Some(2.0));
        assert_eq!(s.to_string(), "single:gevrey:1:2");
        assert_eq!(
            spec("proj-dila0:q_gevrey:2").flavor,
            Flavor {
                kind: Kind::ProjectiveDila,
                little_o: true
            }
        );
        assert!(SpaceSpec::parse("ind-dila:gevrey:1:2", 512).is_err());
        assert!(SpaceSpec::parse("bogus:gevrey:1", 512).is_err());
        assert!(SpaceSpec::parse("single", 512).is_err());
    }

    #[test]
    fn single_sequence_inclusion() {
        let (g, p) = setup();
        let ab =
            decide_inclusion(&spec("single:gevrey:1"), &spec("single:gevrey:2"), &g, &p).unwrap();
        assert_eq!(ab.state(), State::Fails);
        assert_eq!(ab.theorem_tag, "single/sequence-bound");
        let ba =
            decide_inclusion(&spec("single:gevrey:2"), &spec("single:gevrey:1"), &g, &p).unwrap();
        assert_eq!(ba.state(), State::Holds);
        let same =
            decide_inclusion(&spec("single:gevrey:2"), &spec("single:gevrey:2"), &g, &p).unwrap();
        assert_eq!(same.verdict.witness("C"), Some(1.0));
    }

    #[test]
    fn dila_systems_route_through_bridge() {
        let (g, p) = setup();
        // Ind(N) <= Proj(M) iff M ⊲ N: functions of order 1/2 sit inside
        // every class of exponential type, not conversely
        let v = decide_inclusion(
            &spec("ind-dila:gevrey:2"),
            &spec("proj-dila:gevrey:1"),
            &g,
            &p,
        )
        .unwrap();
        assert_eq!(v.state(), State::Holds, "{v:#?}");
        assert_eq!(v.theorem_tag, "dila-sequence/strong-triangle");
        assert_eq!(v.sides.len(), 3);
        let o = decide_inclusion(
            &spec("ind-dila0:gevrey:2"),
            &spec("proj-dila0:gevrey:1"),
            &g,
            &p,
        )
        .unwrap();
        assert_eq!(o.state(), v.state());
        let rev = decide_inclusion(
            &spec("ind-dila:gevrey:1"),
            &spec("proj-dila:gevrey:2"),
            &g,
            &p,
        )
        .unwrap();
        assert_eq!(rev.state(), State::Fails);
    }

    #[test]
    fn routing_errors() {
        let (g, p) = setup();
        for (a, b) in [
            ("single:gevrey:1", "ind-dila:gevrey:1"),
            ("single0:gevrey:1", "single:gevrey:2"),
            ("proj-dila:gevrey:1", "ind-dila:gevrey:2"),
        ] {
            assert!(
                matches!(
                    decide_inclusion(&spec(a), &spec(b), &g, &p),
                    Err(Error::Routing(_))
                ),
                "{a} {b}"
            );
        }
    }

    #[test]
    fn same_source_flavors() {
        let (g, p) = setup();
        let d = decide_inclusion(
            &spec("ind-dila:gevrey:1"),
            &spec("ind-pow:gevrey:1"),
            &g,
            &p,
        )
        .unwrap();
        assert_eq!(d.state(), State::Holds);
        let q = decide_inclusion(
            &spec("ind-pow:q_gevrey:2"),
            &spec("ind-dila:q_gevrey:2"),
            &g,
            &p,
        )
        .unwrap();
        assert_eq!(q.state(), State::Fails);
        assert_eq!(q.theorem_tag, "same-sequence/mg");
    }

    #[test]
    fn system_equivalence() {
        let (g, p) = setup();
        assert_eq!(
            system_equiv(&WeightSequence::gevrey(1.0, 512), &g, &p)
                .unwrap()
                .state(),
            State::Holds
        );
        let q = system_equiv(&WeightSequence::q_gevrey(2.0, 512), &g, &p).unwrap();
        assert_eq!(q.state(), State::Fails);
        assert_eq!(q.verdict.evidence.len(), p.h_ladder.len());
        let geo =
            WeightSequence::new("2^j", (0..64).map(|j| j as f64 * 2f64.ln()).collect()).unwrap();
        assert!(matches!(system_equiv(&geo, &g, &p), Err(Error::Routing(_))));
        let u = Weight::from_sequence(WeightSequence::gevrey(1.0, 512));
        assert_eq!(
            system_equiv_weight(&u, 512, &g, &p).unwrap().state(),
            State::Holds
        );
    }

    #[test]
    fn monomial_norm_is_the_sequence_value() {
        let g = Grid::geometric(&GridSpec::default());
        let m = WeightSequence::gevrey(1.0, 512);
        let v = Weight::from_sequence(m.clone());
        for k in [0usize, 1, 5, 40] {
            let e = norm_estimate(&PowerSeries::monomial(k), &v, &g);
            assert!((e.log_lower - m.log(k)).abs() < 1e-9, "{k}: {e:?}");
            assert!(e.log_upper >= e.log_lower && e.certified);
        }
    }

    #[test]
    fn theta_membership() {
        let (g, p) = setup();
        let m = WeightSequence::gevrey(1.0, 512);
        let th =
            PowerSeries::from_theta(&ThetaFunction::new(m.clone(), ThetaKind::Dila(1.0)).unwrap());
        let ind = SpaceSpec::new(
            Source::Sequence(m.clone()),
            "ind-dila".parse().unwrap(),
            None,
        )
        .unwrap();
        let proj = SpaceSpec::new(Source::Sequence(m), "proj-dila".parse().unwrap(), None).unwrap();
        assert_eq!(membership(&th, &ind, &g, &p).state, State::Holds);
        assert_eq!(membership(&th, &proj, &g, &p).state, State::Fails);
        assert_eq!(
            membership(&PowerSeries::monomial(3), &proj, &g, &p).state,
            State::Holds
        );
    }
}
