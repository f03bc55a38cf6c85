//! Windowed deciders for comparison relations between weights, and the
//! bridges tying weight-level strong relations to sequence-level tests.
//!
//! Conventions, with `ω = -log v`:
//! - `v ≼ w` when `w = O(v)`, i.e. `ω_v - ω_w` is bounded above;
//! - `v ⊲ w` when `w = o(v)`, i.e. `ω_w - ω_v -> +∞`;
//! - dilated and power variants replace `w` by `w_c` resp. `w^c`.
//!
//! Gaps are sampled on the default grid plus the operands' knots, cut to
//! `t >= 1` and the common exact range. Trends use `log t` as abscissa.

use crate::associated::LogWeight;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::policy::Policy;
use crate::sequence::WeightSequence;
use crate::trend::{self, Trend};
use crate::verdict::{fuse, State, Verdict};

use crate::weight::{tail_fit, Weight};

/// Sorted evaluation points shared by every rung of a ladder.
struct Points(Vec<f64>);

impl Points {
    fn new(grid: &Grid, a: &Weight, b: &Weight) -> Self {
        let mut k = a.knots();
        k.extend(b.knots());
        let g = grid.with_all_knots(&k);
        Points(g.between(0.0, f64::INFINITY).to_vec())
    }

    /// Points inside both operands' domains.
    fn window(&self, a: &Weight, b: &Weight) -> &[f64] {
        let lo = a.domain_log_min().max(b.domain_log_min()).max(0.0);
        let hi = a.domain_log_max().min(b.domain_log_max());
        let s = &self.0;
        let i = s.partition_point(|x| *x < lo);
        let j = s.partition_point(|x| *x <= hi);
        &s[i..j.max(i)]
    }
}

struct Gap {
    fit: trend::TrendFit,
    sup: f64,
    arg: f64,
    end: f64,
}

fn gap(pts: &[f64], f: impl Fn(f64) -> f64, policy: &Policy) -> Gap {
    let ys: Vec<f64> = pts.iter().map(|&s| f(s)).collect();
    let (mut sup, mut arg) = (f64::NEG_INFINITY, f64::NAN);
    for (s, y) in pts.iter().zip(&ys) {
        if *y > sup {
            sup = *y;
            arg = *s;
        }
    }
    let lo = pts.first().copied().unwrap_or(0.0);
    Gap {
        fit: tail_fit(pts, &ys, lo, policy),
        sup,
        arg,
        end: pts.last().copied().unwrap_or(f64::NAN),
    }
}

/// `ω_v - ω_w` bounded above on the points.
fn preceq_on(name: &str, v: &Weight, w: &Weight, pts: &[f64], policy: &Policy) -> Verdict {
    let g = gap(pts, |s| v.omega_log(s) - w.omega_log(s), policy);
    match g.fit.trend {
        Trend::Flat | Trend::Falling => {
            Verdict::holds(name).with_witness("C", g.sup.max(0.0).exp())
        }
        Trend::Rising => Verdict::fails(name)
            .with_evidence(g.end, g.fit.last)
            .with_note("omega gap grows on the window"),
        Trend::TooShort => Verdict::inconclusive(name, "window too short"),
        Trend::Unclear => {
            Verdict::inconclusive(name, format!("gap slope {:.3e} in the band", g.fit.slope))
        }
    }
    .with_witness("slope", g.fit.slope)
}

/// `ω_w - ω_v -> +∞` on the points.
fn triangle_on(name: &str, v: &Weight, w: &Weight, pts: &[f64], policy: &Policy) -> Verdict {
    let g = gap(pts, |s| w.omega_log(s) - v.omega_log(s), policy);
    match g.fit.trend {
        Trend::Rising => Verdict::holds(name).with_witness("gap_end", g.fit.last),
        Trend::Flat | Trend::Falling => Verdict::fails(name)
            .with_evidence(g.arg, g.sup)
            .with_note("omega gap stays bounded above on the window"),
        Trend::TooShort => Verdict::inconclusive(name, "window too short"),
        Trend::Unclear => {
            Verdict::inconclusive(name, format!("gap slope {:.3e} in the band", g.fit.slope))
        }
    }
    .with_witness("slope", g.fit.slope)
}

pub fn weight_preceq(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let p = Points::new(grid, v, w);
    preceq_on("preceq", v, w, p.window(v, w), policy)
}

pub fn weight_sim(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let a = weight_preceq(v, w, grid, policy);
    let b = weight_preceq(w, v, grid, policy);
    Verdict::new("sim", a.state.and(b.state))
        .with_sides(vec![a, b])
        .checked()
}

pub fn weight_triangle(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let p = Points::new(grid, v, w);
    triangle_on("triangle", v, w, p.window(v, w), policy)
}

#[derive(Clone, Copy)]
enum Family {
    Dilate,
    Power,
}

impl Family {
    fn apply(self, w: &Weight, c: f64) -> Weight {
        match self {
            Family::Dilate => w.dilate(c),
            Family::Power => w.power(c),
        }
        .expect("ladder parameters are positive")
    }
}

/// `∃ c` on the ascending ladder with `rung(v, family(w, c))` Holding.
fn exists_ladder(
    name: &str,
    v: &Weight,
    w: &Weight,
    fam: Family,
    rung: fn(&str, &Weight, &Weight, &[f64], &Policy) -> Verdict,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let p = Points::new(grid, v, w);
    let mut evaluated = 0usize;
    let mut all_fail = true;
    let mut last = None;
    for &c in &policy.exists_ladder {
        let wc = fam.apply(w, c);
        let r = rung(name, v, &wc, p.window(v, &wc), policy);
        // too-short windows carry a NaN slope and say nothing about c
        if r.witness("slope").is_some_and(f64::is_nan) {
            continue;
        }
        evaluated += 1;
        if r.is(State::Holds) {
            return r.with_witness("c", c);
        }
        all_fail &= r.is(State::Fails);
        last = Some(r);
    }
    match last {
        None => Verdict::inconclusive(name, "no ladder rung had a usable window"),
        Some(r) if all_fail => Verdict::fails(name)
            .with_witness("c_max", *policy.exists_ladder.last().unwrap())
            .with_witness("rungs", evaluated as f64)
            .with_evidence(
                r.evidence.first().map_or(f64::NAN, |e| e.0),
                r.evidence.first().map_or(f64::NAN, |e| e.1),
            )
            .with_note("no ladder parameter works"),
        Some(_) => Verdict::inconclusive(name, "no ladder rung certified, some undecided"),
    }
}

/// `∀ c` on a descending ladder. Rungs are tried from the top; a failing
/// rung in the first `forall_min_depth` positions refutes and an undecided
/// one there leaves the verdict open. A non-holding rung below that depth
/// may be a genuine failure or only the resolution limit of the truncation;
/// `deep(c_resolved, c)` tells them apart from the side's own data and
/// answers Holds for "resolution limit", Fails for "genuine".
pub(crate) fn forall_ladder(
    name: &str,
    ladder: &[f64],
    policy: &Policy,
    mut rung: impl FnMut(f64) -> Verdict,
    deep: impl FnOnce(f64, f64) -> Verdict,
) -> Verdict {
    let mut resolved = None;
    for (depth, &c) in ladder.iter().enumerate() {
        let r = rung(c);
        if r.is(State::Holds) {
            resolved = Some(c);
            continue;
        }
        let refute = |r: &Verdict| {
            Verdict::fails(name).with_witness("c", c).with_evidence(
                r.evidence.first().map_or(f64::NAN, |e| e.0),
                r.evidence.first().map_or(f64::NAN, |e| e.1),
            )
        };
        if depth < policy.forall_min_depth {
            return match r.state {
                State::Fails => refute(&r).with_note(format!("fails at ladder parameter {c}")),
                _ => Verdict::inconclusive(name, format!("rung {c} undecided: {}", r.note)),
            };
        }
        let c_res = resolved.expect("depth >= 1 implies a resolved rung");
        let d = deep(c_res, c);
        return match d.state {
            State::Holds => Verdict::holds(name)
                .with_witness("c_resolved", c_res)
                .with_note(format!(
                "for all c: holds down to c = {c_res}; rung {c} is {} at the truncation limit ({})",
                r.state, d.note
            )),
            State::Fails => {
                refute(&r).with_note(format!("fails at ladder parameter {c} ({})", d.note))
            }
            State::Inconclusive => {
                Verdict::inconclusive(name, format!("rung {c} is {}; {}", r.state, d.note))
            }
        }
        .with_sides(vec![d]);
    }
    Verdict::holds(name)
        .with_witness("c_resolved", *ladder.last().unwrap_or(&f64::NAN))
        .with_note("for all c: every ladder rung holds")
}

/// Window fractions for the critical-parameter trend; six points is the
/// least the trend fit accepts.
const CRITICAL_FRACTIONS: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Smallest ladder parameter whose rung holds on the points up to `end`,
/// by bisection in `log c`. The bracket is widened from `(c_bad, c_res)`
/// by doublings; `None` when it cannot be made to straddle.
fn critical_parameter(
    v: &Weight,
    w: &Weight,
    fam: Family,
    rung: fn(&str, &Weight, &Weight, &[f64], &Policy) -> Verdict,
    p: &Points,
    end: f64,
    (c_bad, c_res): (f64, f64),
    policy: &Policy,
) -> Option<f64> {
    let good = |lc: f64| {
        let wc = fam.apply(w, lc.exp());
        let pts = p.window(v, &wc);
        let pts = &pts[..pts.partition_point(|s| *s <= end)];
        rung("critical", v, &wc, pts, policy).is(State::Holds)
    };
    let step = std::f64::consts::LN_2;
    let (mut bad, mut ok) = (c_bad.ln(), c_res.ln());
    let mut k = 0;
    while good(bad) {
        bad -= step;
        k += 1;
        if k > 4 {
            return None;
        }
    }
    k = 0;
    while !good(ok) {
        ok += step;
        k += 1;
        if k > 10 {
            return None;
        }
    }
    for _ in 0..12 {
        let mid = 0.5 * (bad + ok);
        if good(mid) {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    Some(ok)
}

/// A deep failing rung is the truncation limit when the critical
/// parameter keeps shrinking as the window grows, and genuine when it
/// settles. The trend is `log c*` against the log of the window end.
fn critical_trend(
    v: &Weight,
    w: &Weight,
    fam: Family,
    rung: fn(&str, &Weight, &Weight, &[f64], &Policy) -> Verdict,
    p: &Points,
    (c_res, c_bad): (f64, f64),
    policy: &Policy,
) -> Verdict {
    let name = "critical_parameter";
    let wc = fam.apply(w, c_bad);
    let pts = p.window(v, &wc);
    let (Some(&a), Some(&b)) = (pts.first(), pts.last()) else {
        return Verdict::inconclusive(name, "empty window");
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for f in CRITICAL_FRACTIONS {
        let end = a + f * (b - a);
        if end <= 0.0 {
            continue;
        }
        if let Some(lc) = critical_parameter(v, w, fam, rung, p, end, (c_bad, c_res), policy) {
            xs.push(end.ln());
            ys.push(lc);
        }
    }
    let fit = trend::fit(&xs, &ys, policy);
    let last = ys.last().map_or(f64::NAN, |y| y.exp());
    match fit.trend {
        Trend::Falling => {
            Verdict::holds(name).with_note("critical parameter shrinks with the window")
        }
        Trend::Flat | Trend::Rising => {
            Verdict::fails(name).with_note("critical parameter settles as the window grows")
        }
        Trend::TooShort => {
            Verdict::inconclusive(name, "critical parameter not bracketed on enough windows")
        }
        Trend::Unclear => Verdict::inconclusive(
            name,
            format!("critical parameter slope {:.3e} in the band", fit.slope),
        ),
    }
    .with_witness("c_star", last)
    .with_witness("slope", fit.slope)
}

fn forall(
    name: &str,
    v: &Weight,
    w: &Weight,
    fam: Family,
    rung: fn(&str, &Weight, &Weight, &[f64], &Policy) -> Verdict,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let p = Points::new(grid, v, w);
    forall_ladder(
        name,
        &policy.forall_ladder,
        policy,
        |c| {
            let wc = fam.apply(w, c);
            rung(name, v, &wc, p.window(v, &wc), policy)
        },
        |c_res, c| critical_trend(v, w, fam, rung, &p, (c_res, c), policy),
    )
}

/// `∃ c >= 1: v ≼ w_c`.
pub fn weight_preceq_dila(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    exists_ladder("preceq_dila", v, w, Family::Dilate, preceq_on, grid, policy)
}

/// `∃ c >= 1: v ≼ w^c`.
pub fn weight_preceq_pow(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    exists_ladder("preceq_pow", v, w, Family::Power, preceq_on, grid, policy)
}

pub fn weight_sim_dila(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let a = weight_preceq_dila(v, w, grid, policy);
    let b = weight_preceq_dila(w, v, grid, policy);
    Verdict::new("sim_dila", a.state.and(b.state))
        .with_sides(vec![a, b])
        .checked()
}

pub fn weight_sim_pow(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let a = weight_preceq_pow(v, w, grid, policy);
    let b = weight_preceq_pow(w, v, grid, policy);
    Verdict::new("sim_pow", a.state.and(b.state))
        .with_sides(vec![a, b])
        .checked()
}

/// `∀ c > 0: v ⊲ w_c`.
pub fn weight_triangle_dila(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    forall(
        "triangle_dila",
        v,
        w,
        Family::Dilate,
        triangle_on,
        grid,
        policy,
    )
}

/// `∀ c > 0: v ⊲ w^c`.
pub fn weight_triangle_pow(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    forall(
        "triangle_pow",
        v,
        w,
        Family::Power,
        triangle_on,
        grid,
        policy,
    )
}

/// The same relation through `∀ c > 0: v ≼ w^c`.
pub fn weight_triangle_pow_alt(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    forall(
        "triangle_pow_alt",
        v,
        w,
        Family::Power,
        preceq_on,
        grid,
        policy,
    )
}

/// `∀ c > 0: v ≼ w_c`.
pub fn weight_preceq_all_dila(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    forall(
        "preceq_all_dila",
        v,
        w,
        Family::Dilate,
        preceq_on,
        grid,
        policy,
    )
}

/// `M ⊲ N` three ways: the root-ratio sequence test, `v_N ⊲_c v_M`, and
/// `v_N ≼ v_{M,c}` for all `c`. Holds or Fails only when all three agree.
pub fn bridge_triangle_seq(
    m: &WeightSequence,
    n: &WeightSequence,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let vm = Weight::from_sequence(m.clone());
    let vn = Weight::from_sequence(n.clone());
    bridge_triangle_with(m, n, &vm, &vn, grid, policy)
}

pub(crate) fn bridge_triangle_with(
    m: &WeightSequence,
    n: &WeightSequence,
    vm: &Weight,
    vn: &Weight,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let a = m.seq_triangle(n, policy);
    let b = weight_triangle_dila(vn, vm, grid, policy);
    let c = weight_preceq_all_dila(vn, vm, grid, policy);
    fuse("bridge_triangle", vec![a, b, c])
}

/// `v_N ⊲^c v_M` three ways: the power ladder, `ω_N = o(ω_M)`, and the
/// tilde criterion `(M_{cj})^{1/c} <= A N_j` for all `c`.
pub fn bridge_pow_seq(
    m: &WeightSequence,
    n: &WeightSequence,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let vm = Weight::from_sequence(m.clone());
    let vn = Weight::from_sequence(n.clone());
    bridge_pow_with(m, n, &vm, &vn, grid, policy)
}

pub(crate) fn bridge_pow_with(
    m: &WeightSequence,
    n: &WeightSequence,
    vm: &Weight,
    vn: &Weight,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let a = weight_triangle_pow(vn, vm, grid, policy);
    let b = omega_little_o(vn, vm, grid, policy);
    let c = tilde_criterion(m, n, policy);
    fuse("bridge_pow", vec![a, b, c])
}

/// `ω_v = o(ω_w)`: `y = log(ω_w/ω_v)` diverges against `log log t`.
/// A rising `y` is accepted only if its increment over a doubling of
/// `log t` does not shrink like a power of `log t`; a shrinking increment
/// sums to a finite limit.
pub fn omega_little_o(v: &Weight, w: &Weight, grid: &Grid, policy: &Policy) -> Verdict {
    let name = "omega_little_o";
    let p = Points::new(grid, v, w);
    let y = |s: f64| {
        let (a, b) = (v.omega_log(s), w.omega_log(s));
        (s > 0.0 && a > 0.0 && b > 0.0).then(|| b.ln() - a.ln())
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let pts = p.window(v, w);
    for &s in pts {
        if let Some(r) = y(s) {
            xs.push(s);
            ys.push(r);
        }
    }
    let Some(&hi) = xs.last() else {
        return Verdict::inconclusive(name, "both weights vanish on the window");
    };
    let r = trend::trailing_half(&xs, xs[0].min(pts.first().copied().unwrap_or(0.0)), hi);
    let lx: Vec<f64> = xs[r.clone()].iter().map(|s| s.ln()).collect();
    let f = trend::fit(&lx, &ys[r.clone()], policy);
    let verdict = match f.trend {
        Trend::Rising => {
            let mut dx = Vec::new();
            let mut dy = Vec::new();
            for (i, &s) in xs[r.clone()].iter().enumerate() {
                match y(s / 2.0).map(|h| ys[r.start + i] - h) {
                    Some(d) if d > 0.0 => {
                        dx.push(lx[i]);
                        dy.push(d.ln());
                    }
                    _ => {}
                }
            }
            if dx.len() < lx.len() {
                Verdict::inconclusive(name, "log ratio rises but not monotonically over doublings")
            } else {
                let g = trend::fit(&dx, &dy, policy);
                match g.trend {
                    Trend::Flat | Trend::Rising => {
                        Verdict::holds(name).with_witness("log_ratio_end", f.last)
                    }
                    Trend::Falling => Verdict::fails(name)
                        .with_evidence(hi, f.last)
                        .with_note("log ratio converges: its doubling increment shrinks"),
                    _ => Verdict::inconclusive(
                        name,
                        format!("increment slope {:.3e} in the band", g.slope),
                    ),
                }
                .with_witness("increment_slope", g.slope)
            }
        }
        Trend::Flat | Trend::Falling => Verdict::fails(name)
            .with_evidence(hi, f.last)
            .with_note("omega ratio stays bounded on the window"),
        Trend::TooShort => Verdict::inconclusive(name, "window too short"),
        Trend::Unclear => Verdict::inconclusive(name, format!("slope {:.3e} in the band", f.slope)),
    };
    verdict.with_witness("slope", f.slope)
}

/// `∀ c: (M_{cj})^{1/c} <= A N_j`, over `c = 1, 2, 4, ...` while at least
/// 16 indices remain, with the universal-ladder reading of deep rungs.
pub fn tilde_criterion(m: &WeightSequence, n: &WeightSequence, policy: &Policy) -> Verdict {
    let name = "tilde";
    let jm = m.j_max().min(n.j_max());
    let ladder: Vec<f64> = policy
        .exists_ladder
        .iter()
        .copied()
        .filter(|c| c.fract() == 0.0 && (jm as f64 / c) >= 16.0)
        .collect();
    let diff = |c: usize| {
        let tm = m.tilde(c).expect("c >= 1");
        let hi = tm.j_max().min(n.j_max());
        let d: Vec<f64> = (0..=hi).map(|j| tm.log(j) - n.log(j)).collect();
        d
    };
    let window = |hi: usize| {
        let lo = (hi / 2).max(1);
        let xs: Vec<f64> = (lo..=hi).map(|j| (j as f64).ln()).collect();
        (lo, xs)
    };
    forall_ladder(
        name,
        &ladder,
        policy,
        |c| {
            let d = diff(c as usize);
            let (lo, xs) = window(d.len() - 1);
            let f = trend::fit(&xs, &d[lo..], policy);
            let sup = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            match f.trend {
                Trend::Flat | Trend::Falling => {
                    Verdict::holds(name).with_witness("A", sup.max(0.0).exp())
                }
                Trend::Rising => Verdict::fails(name).with_evidence((d.len() - 1) as f64, f.last),
                _ => Verdict::inconclusive(
                    name,
                    format!("c = {c}: slope {:.3e} in the band", f.slope),
                ),
            }
        },
        // a growing gap whose per-index rate d_j / j keeps falling turns
        // down eventually; a settled rate means geometric growth
        |_, c| {
            let d = diff(c as usize);
            let (lo, xs) = window(d.len() - 1);
            let rate: Vec<f64> = (lo..d.len()).map(|j| d[j] / j as f64).collect();
            let f = trend::fit(&xs, &rate, policy);
            let v = match f.trend {
                Trend::Falling => {
                    Verdict::holds("tilde_rate").with_note("per-index rate keeps falling")
                }
                Trend::Flat | Trend::Rising => {
                    Verdict::fails("tilde_rate").with_note("per-index rate settles")
                }
                _ => Verdict::inconclusive(
                    "tilde_rate",
                    format!("rate slope {:.3e} in the band", f.slope),
                ),
            };
            v.with_witness("slope", f.slope)
        },
    )
}

/// Transfer between the dilatation and power strong relations: if `M` or
/// `N` has (mg), `v_N ⊲_c v_M` must give `v_N ⊲^c v_M`; if one of them has
/// the index (om1) condition, the converse must hold. Fails only when a
/// premise and hypothesis Hold and the conclusion Fails.
pub fn mg_transfer_check(
    m: &WeightSequence,
    n: &WeightSequence,
    grid: &Grid,
    policy: &Policy,
) -> Verdict {
    let vm = Weight::from_sequence(m.clone());
    let vn = Weight::from_sequence(n.clone());
    let dila = weight_triangle_dila(&vn, &vm, grid, policy);
    let pow = weight_triangle_pow(&vn, &vm, grid, policy);
    let mg = m.check_mg(policy).is(State::Holds) || n.check_mg(policy).is(State::Holds);
    let om1 =
        m.check_om1_index(policy).is(State::Holds) || n.check_om1_index(policy).is(State::Holds);
    let part = |name: &str, premise: bool, hyp: &Verdict, concl: &Verdict| -> Verdict {
        if !premise {
            return Verdict::inconclusive(name, "premise not met");
        }
        if !hyp.is(State::Holds) {
            return Verdict::inconclusive(name, format!("hypothesis is {}", hyp.state));
        }
        match concl.state {
            State::Holds => Verdict::holds(name).with_witness("premise", 1.0),
            State::Fails => Verdict::fails(name)
                .with_witness("premise", 1.0)
                .with_note("implication violated on the window"),
            State::Inconclusive => Verdict::inconclusive(name, "conclusion undecided"),
        }
    };
    let a = part("mg_transfer", mg, &dila, &pow);
    let b = part("om1_transfer", om1, &pow, &dila);
    let state = if a.is(State::Fails) || b.is(State::Fails) {
        State::Fails
    } else if a.is(State::Holds) || b.is(State::Holds) {
        State::Holds
    } else {
        State::Inconclusive
    };
    Verdict::new("transfer", state)
        .with_sides(vec![a, b, dila, pow])
        .checked()
}

#[derive(Clone, Debug)]
pub enum Operand {
    Weight(Weight),
    Sequence(WeightSequence),
}

impl Operand {
    fn weight(&self) -> Weight {
        match self {
            Operand::Weight(w) => w.clone(),
            Operand::Sequence(m) => Weight::from_sequence(m.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Preceq,
    Sim,
    PreceqDila,
    PreceqPow,
    SimDila,
    SimPow,
    Triangle,
    TriangleDila,
    TrianglePow,
}

impl std::str::FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "preceq" => Relation::Preceq,
            "sim" => Relation::Sim,
            "preceq-dila" => Relation::PreceqDila,
            "preceq-pow" => Relation::PreceqPow,
            "sim-dila" => Relation::SimDila,
            "sim-pow" => Relation::SimPow,
            "triangle" => Relation::Triangle,
            "triangle-dila" => Relation::TriangleDila,
            "triangle-pow" => Relation::TrianglePow,
            _ => return Err(Error::Routing(format!("relation `{s}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RelationQuery {
    pub left: Operand,
    pub right: Operand,
    pub relation: Relation,
    pub window: Grid,
    pub policy: Policy,
}

impl RelationQuery {
    /// Plain relations between two sequences use the sequence tests; all
    /// others compare the (associated) weights.
    pub fn decide(&self) -> Verdict {
        let (g, p) = (&self.window, &self.policy);
        if let (Operand::Sequence(m), Operand::Sequence(n)) = (&self.left, &self.right) {
            match self.relation {
                Relation::Preceq => return m.seq_preceq(n, p),
                Relation::Sim => return m.seq_approx(n, p),
                Relation::Triangle => return m.seq_triangle(n, p),
                _ => {}
            }
        }
        let (v, w) = (self.left.weight(), self.right.weight());
        match self.relation {
            Relation::Preceq => weight_preceq(&v, &w, g, p),
            Relation::Sim => weight_sim(&v, &w, g, p),
            Relation::PreceqDila => weight_preceq_dila(&v, &w, g, p),
            Relation::PreceqPow => weight_preceq_pow(&v, &w, g, p),
            Relation::SimDila => weight_sim_dila(&v, &w, g, p),
            Relation::SimPow => weight_sim_pow(&v, &w, g, p),
            Relation::Triangle => weight_triangle(&v, &w, g, p),
            Relation::TriangleDila => weight_triangle_dila(&v, &w, g, p),
            Relation::TrianglePow => weight_triangle_pow(&v, &w, g, p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn setup() -> (Grid, Policy) {
        (Grid::geometric(&GridSpec::default()), Policy::default())
    }

    fn g(s: f64) -> WeightSequence {
        WeightSequence::gevrey(s, 512)
    }

    #[test]
    fn reflexive_preceq() {
        let (grid, p) = setup();
        let v = Weight::from_sequence(g(1.0));
        let r = weight_preceq(&v, &v, &grid, &p);
        assert_eq!(r.state, State::Holds);
        assert_eq!(r.witness("C"), Some(1.0));
        assert_eq!(
            weight_preceq_dila(&v, &v, &grid, &p).witness("c"),
            Some(1.0)
        );
        assert_eq!(weight_preceq_pow(&v, &v, &grid, &p).witness("c"), Some(1.0));
        assert_eq!(weight_triangle(&v, &v, &grid, &p).state, State::Fails);
    }

    #[test]
    fn polynomial_against_gevrey() {
        let (grid, p) = setup();
        let poly = Weight::poly(3.0).unwrap();
        let gev = Weight::from_sequence(g(1.0));
        // the gevrey weight decays faster, so gev = O(poly) but not conversely
        assert_eq!(weight_preceq(&poly, &gev, &grid, &p).state, State::Holds);
        assert_eq!(weight_preceq(&gev, &poly, &grid, &p).state, State::Fails);
    }

    #[test]
    fn single_weight_preceq_matches_sequence_bound() {
        let (grid, p) = setup();
        let (m, n) = (g(1.0), g(2.0));
        let (vm, vn) = (
            Weight::from_sequence(m.clone()),
            Weight::from_sequence(n.clone()),
        );
        // v_M ≼ v_N iff N_j <= A M_j; here N = (j!)^2 is not below A j!
        assert_eq!(weight_preceq(&vm, &vn, &grid, &p).state, State::Fails);
        assert_eq!(weight_preceq(&vn, &vm, &grid, &p).state, State::Holds);
    }

    #[test]
    fn bridge_triangle_examples() {
        let (grid, p) = setup();
        let v = bridge_triangle_seq(&g(1.0), &g(2.0), &grid, &p);
        assert_eq!(v.state, State::Holds, "{v:#?}");
        assert!(v.sides.iter().all(|s| s.is(State::Holds)));
        let same = bridge_triangle_seq(&g(1.0), &g(1.0), &grid, &p);
        assert_eq!(same.state, State::Fails);
        assert!(same.sides.iter().all(|s| s.is(State::Fails)));
        let rev = bridge_triangle_seq(&g(2.0), &g(1.0), &grid, &p);
        assert_eq!(rev.state, State::Fails);
    }

    #[test]
    fn bridge_pow_examples() {
        let (grid, p) = setup();
        let v = bridge_pow_seq(&g(1.0), &g(2.0), &grid, &p);
        assert_eq!(v.state, State::Holds, "{v:#?}");
        let same = bridge_pow_seq(&g(1.0), &g(1.0), &grid, &p);
        assert_eq!(same.state, State::Fails, "{same:#?}");
        let v13 = bridge_pow_seq(&g(1.0), &g(3.0), &grid, &p);
        assert_eq!(v13.state, State::Holds);
        assert_eq!(
            bridge_pow_seq(&g(3.0), &g(1.0), &grid, &p).state,
            State::Fails
        );
    }

    #[test]
    fn tilde_brute_force_factorial_pair() {
        // oracle: ((2j)!)^{1/2}/(j!)^2 = sqrt(binom(2j, j))/j! -> 0, so c = 2 is bounded
        let p = Policy::default();
        let m = g(1.0);
        let n = g(2.0);
        let t2 = m.tilde(2).unwrap();
        let lf = crate::sequence::ln_factorials(512);
        for j in [10usize, 100, 256] {
            let direct = 0.5 * lf[2 * j] - 2.0 * lf[j];
            assert!((t2.log(j) - n.log(j) - direct).abs() < 1e-9);
            assert!(direct < 0.0);
        }
        assert_eq!(tilde_criterion(&m, &n, &p).state, State::Holds);
    }

    #[test]
    fn pow_ladder_matches_alternative_form() {
        let (grid, p) = setup();
        let pairs = [
            (g(1.0), g(2.0)),
            (g(2.0), g(1.0)),
            (g(1.0), g(1.0)),
            (g(0.5), g(3.0)),
        ];
        for (m, n) in pairs {
            let (vm, vn) = (Weight::from_sequence(m), Weight::from_sequence(n));
            let a = weight_triangle_pow(&vn, &vm, &grid, &p);
            let b = weight_triangle_pow_alt(&vn, &vm, &grid, &p);
            assert_eq!(a.state, b.state, "{a:#?} {b:#?}");
        }
    }

    #[test]
    fn transfer_on_gevrey_pair() {
        let (grid, p) = setup();
        let v = mg_transfer_check(&g(1.0), &g(2.0), &grid, &p);
        assert_eq!(v.state, State::Holds);
    }

    #[test]
    fn query_dispatch() {
        let (grid, p) = setup();
        let q = RelationQuery {
            left: Operand::Sequence(g(1.0)),
            right: Operand::Sequence(g(2.0)),
            relation: Relation::Triangle,
            window: grid,
            policy: p,
        };
        assert_eq!(q.decide().relation, "seq_triangle");
        assert_eq!(q.decide().state, State::Holds);
        assert!("nonsense".parse::<Relation>().is_err());
    }
}
