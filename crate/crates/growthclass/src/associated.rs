//! The associated weight function `ω_M(t) = sup_j log(t^j / M_j)`, its
//! counting-function form, and Legendre recovery of `M` from `ω_M`.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::policy::Policy;
use crate::sequence::WeightSequence;
use crate::verdict::Verdict;
use std::sync::Arc;

/// Anything with a log-weight `ω(e^s)`.
pub trait LogWeight {
    fn omega_log(&self, s: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// `ω(t) = Σ_{μ_j <= t} log(t/μ_j)`, valid for log-convex sources.
    ClosedForm,
    /// `max_j (j log t - log M_j)`, clamped at 0.
    SupScan,
}

#[derive(Clone, Debug)]
pub struct AssociatedWeight {
    source: Arc<WeightSequence>,
    /// `log μ_j` for `j = 1..=J` of the source (of its minorant when the
    /// source is not log-convex). Sorted in either case.
    knots: Vec<f64>,
    mode: EvalMode,
}

impl AssociatedWeight {
    pub fn new(seq: WeightSequence) -> Self {
        Self::from_arc(Arc::new(seq))
    }

    pub fn from_arc(source: Arc<WeightSequence>) -> Self {
        let convex = source.is_log_convex_tol(1e-12);
        let q = if convex {
            source.quotients().log_quotients
        } else {
            source.log_convex_minorant().quotients().log_quotients
        };
        let mode = if convex {
            EvalMode::ClosedForm
        } else {
            EvalMode::SupScan
        };
        AssociatedWeight {
            source,
            knots: q[1..].to_vec(),
            mode,
        }
    }

    pub fn sequence(&self) -> &WeightSequence {
        &self.source
    }

    pub fn source_arc(&self) -> Arc<WeightSequence> {
        Arc::clone(&self.source)
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// Jump points of the counting function, `log μ_j`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// `log μ_J`. Beyond this the truncation, not the sequence, decides `ω`.
    pub fn log_domain_max(&self) -> f64 {
        *self.knots.last().expect("sequences have J >= 2")
    }

    /// `Σ_M(e^s) = #{j >= 1 : μ_j <= e^s}` within the truncation.
    pub fn counting_log(&self, s: f64) -> usize {
        self.knots.partition_point(|k| *k <= s)
    }

    pub fn counting(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t}")));
        }
        Ok(self.counting_log(t.ln()))
    }

    /// Counting-function closed form. The step function integrates to
    /// `k log t - log M_k` with `k = Σ_M(t)`.
    pub fn omega_closed(&self, s: f64) -> f64 {
        if s == f64::NEG_INFINITY {
            return 0.0;
        }
        let k = self.counting_log(s);
        if k == 0 {
            return 0.0;
        }
        (k as f64 * s - self.source.log(k)).max(0.0)
    }

    pub fn omega_sup_scan(&self, s: f64) -> f64 {
        if s == f64::NEG_INFINITY {
            return 0.0;
        }
        let lv = self.source.log_values();
        let mut best = 0.0f64;
        for (j, l) in lv.iter().enumerate().skip(1) {
            best = best.max(j as f64 * s - l);
        }
        best
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t}")));
        }
        Ok(self.omega_log(t.ln()))
    }

    /// Knot-augmented grid for Legendre recovery: the default grid plus
    /// every knot `μ_j <= t_max`.
    pub fn recovery_grid(&self, base: &Grid) -> Grid {
        base.with_knots(&self.knots)
    }

    /// Condition-check grid: the default grid plus every truncation knot,
    /// so the whole range where `ω_M` is exact gets sampled.
    pub fn condition_grid(&self, base: &Grid) -> Grid {
        base.with_all_knots(&self.knots)
    }

    /// Largest `j` whose recovery from this grid is trusted:
    /// `floor(safety * Σ_M(t_max))`.
    pub fn reliable_range(&self, grid: &Grid, policy: &Policy) -> usize {
        let k = self.counting_log(grid.log_max());
        (policy.reliable_safety * k as f64).floor() as usize
    }
}

impl LogWeight for AssociatedWeight {
    fn omega_log(&self, s: f64) -> f64 {
        match self.mode {
            EvalMode::ClosedForm => self.omega_closed(s),
            EvalMode::SupScan => self.omega_sup_scan(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recovery {
    pub log_value: f64,
    /// `log t` where the supremum was attained.
    pub argmax: f64,
    pub reliable: bool,
}

/// `sup_{t in grid} (j log t - ω(t))`; Holds for `log M_j` when the grid
/// contains the knots. Flagged unreliable when the sup sits on the grid end.
pub fn legendre_recover<W: LogWeight + ?Sized>(omega: &W, j: usize, grid: &Grid) -> Recovery {
    let jf = j as f64;
    let mut best = f64::NEG_INFINITY;
    let mut arg = f64::NAN;
    for &s in grid.log_points() {
        let v = jf * s - omega.omega_log(s);
        if v > best {
            best = v;
            arg = s;
        }
    }
    // any t below the grid start has ω = 0 near 0, contributing j log t -> -inf
    // for j >= 1 and exactly 0 for j = 0
    if j == 0 {
        best = best.max(0.0);
    }
    Recovery {
        log_value: best,
        argmax: arg,
        reliable: arg < grid.log_max() || j == 0,
    }
}

/// Recovery over `0..=j_max`, with the sequence-specific reliability rule.
pub fn recover_sequence(w: &AssociatedWeight, grid: &Grid, policy: &Policy) -> (Vec<f64>, usize) {
    let g = w.recovery_grid(grid);
    let jm = w.sequence().j_max();
    let vals = (0..=jm)
        .map(|j| legendre_recover(w, j, &g).log_value)
        .collect();
    (vals, w.reliable_range(grid, policy))
}

/// `2ω(t) <= ω(Ht) + H` on `t >= 1`, searched over the H ladder.
pub fn check_om6_omega(w: &AssociatedWeight, grid: &Grid, policy: &Policy) -> Verdict {
    let g = w.condition_grid(grid);
    om6_search(
        "om6_omega",
        w,
        g.between(0.0, f64::INFINITY),
        w.log_domain_max(),
        policy,
    )
}

/// `ω(2t) <= L(ω(t) + 1)` on `t >= 1`, searched over the L ladder.
pub fn check_om1_omega(w: &AssociatedWeight, grid: &Grid, policy: &Policy) -> Verdict {
    let g = w.condition_grid(grid);
    om1_search(
        "om1_omega",
        w,
        g.between(0.0, f64::INFINITY),
        w.log_domain_max(),
        policy,
    )
}

pub(crate) fn om6_search<W: LogWeight + ?Sized>(
    name: &str,
    w: &W,
    pts: &[f64],
    dom: f64,
    policy: &Policy,
) -> Verdict {
    let mut evidence = Vec::new();
    let mut evaluated = 0usize;
    for &h in &policy.h_ladder {
        let lh = h.ln();
        let mut worst = (f64::NAN, f64::NEG_INFINITY);
        let mut n = 0usize;
        for &s in pts.iter().filter(|s| **s + lh <= dom) {
            n += 1;
            let lhs = 2.0 * w.omega_log(s);
            let rhs = w.omega_log(s + lh) + h;
            let excess = lhs - rhs;
            if excess > worst.1 {
                worst = (s, excess);
            }
        }
        if n == 0 {
            continue;
        }
        evaluated += 1;
        if worst.1 <= policy.slack(2.0 * w.omega_log(worst.0)) {
            return Verdict::holds(name)
                .with_witness("H", h)
                .with_evidence(worst.0, worst.1);
        }
        evidence.push((worst.0, worst.1));
    }
    if evaluated == 0 {
        return Verdict::inconclusive(name, "no evaluation point inside the exact range");
    }
    let mut v = Verdict::fails(name)
        .with_witness("H_max", *policy.h_ladder.last().unwrap_or(&f64::NAN))
        .with_note("evidence lists (log t, 2w(t) - w(Ht) - H) per ladder rung");
    v.evidence = evidence;
    v
}

pub(crate) fn om1_search<W: LogWeight + ?Sized>(
    name: &str,
    w: &W,
    pts: &[f64],
    dom: f64,
    policy: &Policy,
) -> Verdict {
    let l2 = std::f64::consts::LN_2;
    let inside: Vec<f64> = pts.iter().copied().filter(|s| *s + l2 <= dom).collect();
    if inside.is_empty() {
        return Verdict::inconclusive(name, "no evaluation point inside the exact range");
    }
    let mut evidence = Vec::new();
    for &l in &policy.h_ladder {
        let mut worst = (f64::NAN, f64::NEG_INFINITY);
        for &s in &inside {
            let lhs = w.omega_log(s + l2);
            let excess = lhs - l * (w.omega_log(s) + 1.0);
            if excess > worst.1 {
                worst = (s, excess);
            }
        }
        if worst.1 <= policy.slack(w.omega_log(worst.0 + l2)) {
            return Verdict::holds(name)
                .with_witness("L", l)
                .with_evidence(worst.0, worst.1);
        }
        evidence.push(worst);
    }
    let mut v =
        Verdict::fails(name).with_note("evidence lists (log t, w(2t) - L(w(t)+1)) per rung");
    v.evidence = evidence;
    v
}

/// `sup_t t^j / exp(c ω_N(t))`, envelope-projected, with the D-bound
/// `ω_{N^c} <= c ω_N <= 2 ω_{N^c} + D` checked on the grid.
pub fn auxiliary_seq(
    n: &AssociatedWeight,
    c: u32,
    grid: &Grid,
    policy: &Policy,
) -> (WeightSequence, Verdict) {
    let g = n.recovery_grid(grid);
    let cf = c as f64;
    let scaled = Scaled { inner: n, c: cf };
    let jm = n.sequence().j_max();
    let raw: Vec<f64> = (0..=jm)
        .map(|j| legendre_recover(&scaled, j, &g).log_value)
        .collect();
    let seq = WeightSequence::new(format!("aux{c}({})", n.sequence().label), raw)
        .expect("recovered values are finite with log value 0 at j = 0")
        .log_convex_minorant()
        .with_label(format!("aux{c}({})", n.sequence().label));
    let aux = AssociatedWeight::new(seq.clone());
    let mut upper_ok = true;
    let mut d = f64::NEG_INFINITY;
    let mut worst = (f64::NAN, 0.0);
    for &s in g.log_points() {
        let wa = aux.omega_sup_scan(s);
        let wc = cf * n.omega_log(s);
        if wa > wc + policy.slack(wc) {
            upper_ok = false;
            worst = (s, wa - wc);
        }
        d = d.max(wc - 2.0 * wa);
    }
    let reliable = n.reliable_range(grid, policy);
    let v = if upper_ok && d.is_finite() {
        Verdict::holds("aux_bound").with_witness("D", d.max(0.0))
    } else {
        Verdict::fails("aux_bound").with_evidence(worst.0, worst.1)
    }
    .with_witness("reliable_j", reliable as f64)
    .with_note("entries beyond reliable_j are truncation-dominated");
    (seq, v)
}

struct Scaled<'a> {
    inner: &'a AssociatedWeight,
    c: f64,
}

impl LogWeight for Scaled<'_> {
    fn omega_log(&self, s: f64) -> f64 {
        self.c * self.inner.omega_log(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::verdict::State;

    fn brute_sup(m: &WeightSequence, t: f64) -> f64 {
        // independent oracle: linear-domain-free direct max over all j
        let mut best = 0.0f64;
        for j in 0..=m.j_max() {
            best = best.max(j as f64 * t.ln() - m.log(j));
        }
        best
    }

    #[test]
    fn vanishes_below_first_quotient() {
        let w = AssociatedWeight::new(WeightSequence::gevrey(1.0, 512));
        assert_eq!(w.omega(0.5).unwrap(), 0.0);
        assert_eq!(w.omega(0.0).unwrap(), 0.0);
        assert!(w.omega(-1.0).is_err());
    }

    #[test]
    fn factorial_at_e_matches_sup() {
        let m = WeightSequence::gevrey(1.0, 512);
        let w = AssociatedWeight::new(m.clone());
        let e = std::f64::consts::E;
        assert!((w.omega(e).unwrap() - brute_sup(&m, e)).abs() < 1e-12);
    }

    #[test]
    fn geometric_source_is_truncation_dominated() {
        let m =
            WeightSequence::new("geo", (0..=512).map(|j| j as f64 * 2f64.ln()).collect()).unwrap();
        let w = AssociatedWeight::new(m);
        let v = w.omega(8.0).unwrap();
        assert!((v - 512.0 * 4f64.ln()).abs() < 1e-9);
        assert!(w.log_domain_max() < 8f64.ln());
    }

    #[test]
    fn counting_examples() {
        let w = AssociatedWeight::new(WeightSequence::gevrey(1.0, 64));
        assert_eq!(w.counting(0.5).unwrap(), 0);
        assert_eq!(w.counting(3.5).unwrap(), 3);
    }

    #[test]
    fn recovery_roundtrip_factorial() {
        let m = WeightSequence::gevrey(1.0, 512);
        let w = AssociatedWeight::new(m.clone());
        let g = w.recovery_grid(&Grid::geometric(&GridSpec::default()));
        for j in 0..=50 {
            let r = legendre_recover(&w, j, &g);
            assert!((r.log_value - m.log(j)).abs() <= 1e-9 * m.log(j).abs().max(1.0));
            assert!(r.reliable);
        }
    }

    #[test]
    fn recovery_of_non_convex_is_minorant() {
        let m = WeightSequence::new("ex", vec![0.0, 10f64.ln(), 20f64.ln(), 200f64.ln()]).unwrap();
        let w = AssociatedWeight::new(m.clone());
        assert_eq!(w.mode(), EvalMode::SupScan);
        let g = w.recovery_grid(&Grid::geometric(&GridSpec::default()));
        let lc = m.log_convex_minorant();
        for j in 0..=3 {
            let r = legendre_recover(&w, j, &g);
            assert!((r.log_value - lc.log(j)).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn minorant_has_same_omega() {
        let m = WeightSequence::new("ex", vec![0.0, 10f64.ln(), 20f64.ln(), 200f64.ln()]).unwrap();
        let a = AssociatedWeight::new(m.clone());
        let b = AssociatedWeight::new(m.log_convex_minorant());
        for &s in Grid::geometric(&GridSpec::default()).log_points() {
            assert!((a.omega_log(s) - b.omega_log(s)).abs() < 1e-9);
        }
    }

    #[test]
    fn om_conditions_on_gevrey_and_q_gevrey() {
        let p = Policy::default();
        let g = Grid::geometric(&GridSpec::default());
        let gev = AssociatedWeight::new(WeightSequence::gevrey(1.0, 512));
        assert_eq!(check_om6_omega(&gev, &g, &p).state, State::Holds);
        assert_eq!(check_om1_omega(&gev, &g, &p).state, State::Holds);
        let q = AssociatedWeight::new(WeightSequence::q_gevrey(2.0, 512));
        let v6 = check_om6_omega(&q, &g, &p);
        assert_eq!(v6.state, State::Fails);
        assert_eq!(v6.evidence.len(), p.h_ladder.len());
        assert!(v6.evidence.iter().all(|(_, e)| *e > 0.0));
        assert_eq!(check_om1_omega(&q, &g, &p).state, State::Holds);
    }

    #[test]
    fn auxiliary_c1_recovers_source() {
        let p = Policy::default();
        let grid = Grid::geometric(&GridSpec::default());
        let m = WeightSequence::gevrey(1.0, 512);
        let w = AssociatedWeight::new(m.clone());
        let (aux, v) = auxiliary_seq(&w, 1, &grid, &p);
        assert_eq!(v.state, State::Holds);
        for j in 0..=w.reliable_range(&grid, &p) {
            assert!((aux.log(j) - m.log(j)).abs() <= 1e-9 * m.log(j).abs().max(1.0));
        }
        let (_, v2) = auxiliary_seq(&w, 2, &grid, &p);
        assert_eq!(v2.state, State::Holds);
        assert!(v2.witness("D").unwrap().is_finite());
    }

    #[test]
    fn omega_over_log_diverges() {
        let w = AssociatedWeight::new(WeightSequence::q_gevrey(1.5, 512));
        let a = w.omega(1e4).unwrap() / 1e4f64.ln();
        let b = w.omega(1e8).unwrap() / 1e8f64.ln();
        assert!(b > a);
    }
}
