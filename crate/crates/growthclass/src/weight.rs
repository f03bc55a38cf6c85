//! Radial weights `v = exp(-ω)` represented by their log-weight, their
//! predicates, and the associated weight sequence `M^u_j = sup_t t^j u(t)`.

use crate::associated::{om1_search, om6_search, AssociatedWeight, LogWeight};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::policy::Policy;
use crate::sequence::WeightSequence;
use crate::trend::{self, Trend, TrendFit};
use crate::verdict::{State, Verdict};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Weight {
    node: Arc<Node>,
    label: String,
}

#[derive(Debug)]
enum Node {
    Sequence(Arc<AssociatedWeight>),
    /// `ω(t) = a t`.
    Exp(f64),
    /// `ω(t) = k log(1 + t)`.
    Poly(f64),
    Table(Table),
    Dilate(Weight, f64),
    Power(Weight, f64),
    /// `max(0, ω(t) - ω(1))` for `t >= 1`, zero below; carries `ω(1)`.
    Normalize(Weight, f64),
}

/// Samples `(log t_i, ω_i)`, interpolated linearly in `log t`.
#[derive(Debug)]
struct Table {
    log_t: Vec<f64>,
    omega: Vec<f64>,
    /// The table starts at zero, so `ω ≡ 0` below the first sample.
    zero_below: bool,
}

impl Table {
    fn eval(&self, s: f64) -> f64 {
        let n = self.log_t.len();
        if s < self.log_t[0] {
            return if self.zero_below { 0.0 } else { f64::NAN };
        }
        if s > self.log_t[n - 1] {
            return f64::NAN;
        }
        let i = self.log_t.partition_point(|x| *x <= s);
        if i >= n {
            return self.omega[n - 1];
        }
        let (a, b) = (i - 1, i);
        let w = (s - self.log_t[a]) / (self.log_t[b] - self.log_t[a]);
        self.omega[a] + w * (self.omega[b] - self.omega[a])
    }
}

/// Which of the two one-parameter families built from `v_M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VKind {
    /// `v_{M,c}(t) = exp(-ω_M(ct))`.
    Dilate(f64),
    /// `v^c_M(t) = exp(-c ω_M(t))`.
    Power(f64),
}

impl Weight {
    fn from_node(node: Node, label: String) -> Self {
        Weight {
            node: Arc::new(node),
            label,
        }
    }

    /// `v_M = exp(-ω_M)`.
    pub fn from_sequence(m: WeightSequence) -> Self {
        Self::from_associated(Arc::new(AssociatedWeight::new(m)))
    }

    pub fn from_associated(w: Arc<AssociatedWeight>) -> Self {
        let label = format!("v[{}]", w.sequence().label);
        Self::from_node(Node::Sequence(w), label)
    }

    /// `v(t) = exp(-a t)`.
    pub fn exp(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidWeight(format!("exp rate {a}")));
        }
        Ok(Self::from_node(Node::Exp(a), format!("exp:{a}")))
    }

    /// `v(t) = (1 + t)^{-k}`.
    pub fn poly(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidWeight(format!("poly exponent {k}")));
        }
        Ok(Self::from_node(Node::Poly(k), format!("poly:{k}")))
    }

    /// Tabulated `ω` at strictly increasing `t`. A leading `t = 0` row must
    /// carry `ω = 0`, in which case `ω` vanishes below the first positive
    /// sample as well.
    pub fn tabulated(label: impl Into<String>, t: &[f64], omega: &[f64]) -> Result<Self> {
        if t.len() != omega.len() {
            return Err(Error::InvalidWeight("t and omega lengths differ".into()));
        }
        let mut zero_below = false;
        let mut log_t = Vec::with_capacity(t.len());
        let mut om = Vec::with_capacity(t.len());
        for (i, (&ti, &wi)) in t.iter().zip(omega).enumerate() {
            if !ti.is_finite() || !wi.is_finite() || ti < 0.0 {
                return Err(Error::InvalidWeight(format!(
                    "row {i} is not a finite (t >= 0, omega) pair"
                )));
            }
            if i > 0 && ti <= t[i - 1] {
                return Err(Error::InvalidWeight(format!(
                    "t not strictly increasing at row {i}"
                )));
            }
            if i > 0 && wi < omega[i - 1] {
                return Err(Error::InvalidWeight(format!("omega decreases at row {i}")));
            }
            if ti == 0.0 {
                if wi != 0.0 {
                    return Err(Error::InvalidWeight("omega(0) must be 0".into()));
                }
                zero_below = true;
                continue;
            }
            log_t.push(ti.ln());
            om.push(wi);
        }
        if log_t.len() < 2 {
            return Err(Error::InvalidWeight(
                "need at least two samples with t > 0".into(),
            ));
        }
        // ω is non-decreasing, so a zero first sample pins ω ≡ 0 below it too
        zero_below = zero_below || om[0] == 0.0;
        let table = Table {
            log_t,
            omega: om,
            zero_below,
        };
        Ok(Self::from_node(Node::Table(table), label.into()))
    }

    /// `v_{M,c}` or `v^c_M`.
    pub fn v_weight(m: WeightSequence, kind: VKind) -> Result<Self> {
        let base = Self::from_sequence(m);
        match kind {
            VKind::Dilate(c) => base.dilate(c),
            VKind::Power(c) => base.power(c),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `t ↦ v(ct)`, log-weight `ω(ct)`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidWeight(format!("dilation {c}")));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        let label = format!("{}_[{c}]", self.label);
        Ok(Self::from_node(Node::Dilate(self.clone(), c), label))
    }

    /// `t ↦ v(t)^c`, log-weight `c ω(t)`.
    pub fn power(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidWeight(format!("power {c}")));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        let label = format!("{}^[{c}]", self.label);
        Ok(Self::from_node(Node::Power(self.clone(), c), label))
    }

    /// Shift so that `v ≡ 1` on `[0, 1]`, clamping at 0 above.
    pub fn normalize(&self) -> Result<Self> {
        if let Node::Normalize(..) = &*self.node {
            return Ok(self.clone());
        }
        if !(self.domain_log_min() <= 0.0 && self.domain_log_max() >= 0.0) {
            return Err(Error::Domain("normalization needs omega(1)".into()));
        }
        let shift = self.omega_log(0.0);
        let label = format!("norm({})", self.label);
        Ok(Self::from_node(Node::Normalize(self.clone(), shift), label))
    }

    pub fn is_normalized_node(&self) -> bool {
        matches!(&*self.node, Node::Normalize(..))
    }

    /// `ω ≡ 0` on `[0, 1]` and `ω >= 0` on the given points.
    pub fn is_normalized_on(&self, pts: &[f64]) -> bool {
        pts.iter().all(|&s| {
            let w = self.omega_log(s);
            if s <= 0.0 {
                w == 0.0
            } else {
                w.is_nan() || w >= 0.0
            }
        })
    }

    /// Smallest `log t` where `ω` is defined.
    pub fn domain_log_min(&self) -> f64 {
        match &*self.node {
            Node::Sequence(_) | Node::Exp(_) | Node::Poly(_) | Node::Normalize(..) => {
                f64::NEG_INFINITY
            }
            Node::Table(t) if t.zero_below => f64::NEG_INFINITY,
            Node::Table(t) => t.log_t[0],
            Node::Dilate(w, c) => w.domain_log_min() - c.ln(),
            Node::Power(w, _) => w.domain_log_min(),
        }
    }

    /// Largest `log t` where `ω` is trusted. For sequence weights this is
    /// `log μ_J`, the end of the truncation's exact range.
    pub fn domain_log_max(&self) -> f64 {
        match &*self.node {
            Node::Sequence(a) => a.log_domain_max(),
            Node::Exp(_) | Node::Poly(_) => f64::INFINITY,
            Node::Table(t) => *t.log_t.last().unwrap(),
            Node::Dilate(w, c) => w.domain_log_max() - c.ln(),
            Node::Power(w, _) | Node::Normalize(w, _) => w.domain_log_max(),
        }
    }

    /// Kinks of `ω` in `log t`.
    pub fn knots(&self) -> Vec<f64> {
        match &*self.node {
            Node::Sequence(a) => a.knots().to_vec(),
            Node::Exp(_) | Node::Poly(_) => Vec::new(),
            Node::Table(t) => t.log_t.clone(),
            Node::Dilate(w, c) => {
                let lc = c.ln();
                w.knots().into_iter().map(|k| k - lc).collect()
            }
            Node::Power(w, _) => w.knots(),
            Node::Normalize(w, _) => {
                let mut k: Vec<f64> = w.knots().into_iter().filter(|k| *k > 0.0).collect();
                k.insert(0, 0.0);
                k
            }
        }
    }

    pub fn is_tabulated(&self) -> bool {
        match &*self.node {
            Node::Table(_) => true,
            Node::Sequence(_) | Node::Exp(_) | Node::Poly(_) => false,
            Node::Dilate(w, _) | Node::Power(w, _) | Node::Normalize(w, _) => w.is_tabulated(),
        }
    }

    /// The underlying associated weight when this is `v_M` itself.
    pub fn as_sequence(&self) -> Option<&Arc<AssociatedWeight>> {
        match &*self.node {
            Node::Sequence(a) => Some(a),
            _ => None,
        }
    }

    /// `(M, c)` when this is `v_{M,c}` for a sequence `M` (`c = 1` for `v_M`).
    pub fn as_dilated_sequence(&self) -> Option<(&Arc<AssociatedWeight>, f64)> {
        match &*self.node {
            Node::Sequence(a) => Some((a, 1.0)),
            Node::Dilate(w, c) => w.as_dilated_sequence().map(|(a, d)| (a, d * c)),
            _ => None,
        }
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t}")));
        }
        let s = t.ln();
        if s < self.domain_log_min() || s > self.domain_log_max() {
            return Err(Error::Domain(format!("t = {t} for weight {}", self.label)));
        }
        Ok(self.omega_log(s))
    }

    /// Default grid plus every knot, cut to the domain. Points beyond the
    /// grid end are kept when the domain reaches that far.
    pub fn eval_points(&self, grid: &Grid) -> Vec<f64> {
        let (lo, hi) = (self.domain_log_min(), self.domain_log_max());
        grid.with_all_knots(&self.knots()).between(lo, hi).to_vec()
    }

    /// Like [`Weight::eval_points`], but inside the grid's own range.
    pub fn recovery_points(&self, grid: &Grid) -> Vec<f64> {
        let (lo, hi) = (self.domain_log_min(), self.domain_log_max());
        grid.with_knots(&self.knots()).between(lo, hi).to_vec()
    }

    /// `(ω₃)`: `ω(t)/log t` diverges on the trailing half of `t >= 1`.
    pub fn rapidly_decreasing(&self, grid: &Grid, policy: &Policy) -> Verdict {
        let pts: Vec<f64> = self
            .eval_points(grid)
            .into_iter()
            .filter(|s| *s > 0.0)
            .collect();
        let ys: Vec<f64> = pts.iter().map(|&s| self.omega_log(s) / s).collect();
        let f = tail_fit(&pts, &ys, 0.0, policy);
        match f.trend {
            Trend::Rising => Verdict::holds("om3"),
            Trend::Flat | Trend::Falling => Verdict::fails("om3")
                .with_evidence(f.argmax, f.max)
                .with_note("omega/log t stays bounded on the window"),
            _ => Verdict::inconclusive("om3", format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("ratio_end", f.last)
        .with_witness("slope", f.slope)
    }

    /// Convexity of `s ↦ ω(e^s)` from second differences on a uniform grid,
    /// plus the sample slopes for tabulated weights.
    pub fn is_convex_weight(&self, grid: &Grid, policy: &Policy) -> Verdict {
        let tol = if self.is_tabulated() {
            policy.convex_tol_table
        } else {
            policy.convex_tol_closed
        };
        let lo = self.domain_log_min().max(grid.log_min());
        let hi = self.domain_log_max().min(grid.log_max());
        let n = grid.len().max(3);
        if !(hi > lo) {
            return Verdict::inconclusive("convex", "empty evaluation range");
        }
        let h = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&s| self.omega_log(s)).collect();
        for i in 1..n - 1 {
            let d2 = ys[i + 1] - 2.0 * ys[i] + ys[i - 1];
            if d2 < -tol * ys[i].abs().max(1.0) {
                return Verdict::fails("convex")
                    .with_witness("log_t", xs[i])
                    .with_evidence(xs[i - 1], ys[i - 1])
                    .with_evidence(xs[i], ys[i])
                    .with_evidence(xs[i + 1], ys[i + 1])
                    .with_note(format!("second difference {d2:.3e} at the middle point"));
            }
        }
        if let Node::Table(t) = &*self.node {
            let slopes: Vec<f64> = (1..t.log_t.len())
                .map(|i| (t.omega[i] - t.omega[i - 1]) / (t.log_t[i] - t.log_t[i - 1]))
                .collect();
            for i in 1..slopes.len() {
                if slopes[i] < slopes[i - 1] - tol * slopes[i - 1].abs().max(1.0) {
                    return Verdict::fails("convex")
                        .with_witness("log_t", t.log_t[i])
                        .with_evidence(t.log_t[i - 1], t.omega[i - 1])
                        .with_evidence(t.log_t[i], t.omega[i])
                        .with_evidence(t.log_t[i + 1], t.omega[i + 1])
                        .with_note("sample slopes decrease");
                }
            }
        }
        Verdict::holds("convex")
            .with_witness("tol", tol)
            .with_witness("points", n as f64)
    }

    /// `log M^u_j = sup_t (j log t - ω(t))` over the knot-augmented grid,
    /// envelope-projected.
    pub fn associated_sequence(
        &self,
        j_max: usize,
        grid: &Grid,
        policy: &Policy,
    ) -> Result<AssociatedSequence> {
        let pts = self.recovery_points(grid);
        if pts.len() < 2 {
            return Err(Error::Domain(format!(
                "no grid points inside the domain of {}",
                self.label
            )));
        }
        let om: Vec<f64> = pts.iter().map(|&s| self.omega_log(s)).collect();
        let last = *pts.last().unwrap();
        let mut raw = Vec::with_capacity(j_max + 1);
        let mut argmax = Vec::with_capacity(j_max + 1);
        for j in 0..=j_max {
            let jf = j as f64;
            let (mut best, mut arg) = (f64::NEG_INFINITY, f64::NAN);
            for (s, w) in pts.iter().zip(&om) {
                let v = jf * s - w;
                if v > best {
                    best = v;
                    arg = *s;
                }
            }
            raw.push(best);
            argmax.push(arg);
        }
        // normalized weights have sup u = 1, reached on [0, 1]
        if raw[0].abs() > policy.slack(1.0) * 1e3 {
            return Err(Error::InvalidWeight(format!(
                "{} is not normalized (sup u = exp({}))",
                self.label, raw[0]
            )));
        }
        raw[0] = 0.0;
        let interior = argmax.iter().skip(1).take_while(|a| **a < last).count();
        let reliable_j = (policy.reliable_safety * interior as f64).floor() as usize;
        let raw_seq = WeightSequence::new(format!("M[{}]", self.label), raw.clone())?;
        let lc = raw_seq.log_convex_minorant();
        let exact = exact_log_convex(lc.log_values());
        let projection = raw
            .iter()
            .zip(&exact)
            .map(|(r, e)| (r - e).abs())
            .fold(0.0, f64::max);
        let seq = WeightSequence::new(format!("M[{}]", self.label), exact)?;
        Ok(AssociatedSequence {
            seq,
            raw,
            argmax,
            reliable_j,
            projection,
        })
    }

    /// Sandwich `(1/A) v_{M^u}^2 <= u <= v_{M^u}` on the grid, `A` minimal.
    pub fn sandwich_check(&self, j_max: usize, grid: &Grid, policy: &Policy) -> Result<Verdict> {
        let convex = self.is_convex_weight(grid, policy);
        let assoc = self.associated_sequence(j_max, grid, policy)?;
        let mw = AssociatedWeight::new(assoc.seq.clone());
        let dom = mw.log_domain_max();
        let pts: Vec<f64> = self
            .recovery_points(grid)
            .into_iter()
            .filter(|s| *s <= dom)
            .collect();
        let mut upper_bad = None;
        let mut log_a = 0.0f64;
        let mut arg = f64::NAN;
        let mut gaps = Vec::with_capacity(pts.len());
        for &s in &pts {
            let wu = self.omega_log(s);
            let wm = mw.omega_log(s);
            if wm > wu + policy.slack(wu) * 1e3 && upper_bad.is_none() {
                upper_bad = Some((s, wm - wu));
            }
            let g = wu - 2.0 * wm;
            if g > log_a {
                log_a = g;
                arg = s;
            }
            gaps.push(g);
        }
        if let Some((s, e)) = upper_bad {
            return Ok(Verdict::fails("sandwich")
                .with_evidence(s, e)
                .with_note("upper bound u <= v_{M^u} violated; the sup grid is inconsistent"));
        }
        let f = tail_fit(
            &pts,
            &gaps,
            0.0f64.max(pts.first().copied().unwrap_or(0.0)),
            policy,
        );
        let mut v = match f.trend {
            Trend::Rising => Verdict::fails("sandwich")
                .with_evidence(f.argmax, f.max)
                .with_note("omega - 2 omega_{M^u} grows on the window; no finite A"),
            Trend::TooShort => Verdict::inconclusive("sandwich", "window too short"),
            _ => Verdict::holds("sandwich"),
        }
        .with_witness("A", log_a.exp())
        .with_witness("log_t_at_A", arg)
        .with_witness("projection", assoc.projection);
        if !convex.is(State::Holds) {
            v = v.with_note("weight not certified convex; the lower bound is not guaranteed");
        }
        Ok(v)
    }

    /// `2ω(t) <= ω(Ht) + H`, equivalently `u(Ht) <= e^H u(t)^2`.
    pub fn check_om6_weight(&self, grid: &Grid, policy: &Policy) -> Verdict {
        let pts: Vec<f64> = self
            .eval_points(grid)
            .into_iter()
            .filter(|s| *s >= 0.0)
            .collect();
        om6_search("om6_weight", self, &pts, self.domain_log_max(), policy)
    }

    /// `ω(2t) <= L(ω(t) + 1)`, equivalently `u(t)^L <= e^L u(2t)`.
    pub fn check_om1_weight(&self, grid: &Grid, policy: &Policy) -> Verdict {
        let pts: Vec<f64> = self
            .eval_points(grid)
            .into_iter()
            .filter(|s| *s >= 0.0)
            .collect();
        om1_search("om1_weight", self, &pts, self.domain_log_max(), policy)
    }

    /// Lower approximation `v_{M^v}` of the associated weight, certified
    /// only up to a square by the sandwich constant.
    pub fn essential_approx(
        &self,
        j_max: usize,
        grid: &Grid,
        policy: &Policy,
    ) -> Result<(Weight, Verdict)> {
        let assoc = self.associated_sequence(j_max, grid, policy)?;
        let approx = Weight::from_sequence(assoc.seq);
        if !self.is_convex_weight(grid, policy).is(State::Holds) {
            let v = Verdict::inconclusive(
                "essential_up_to_square",
                "weight not convex; sandwich unavailable",
            );
            return Ok((approx, v));
        }
        let s = self
            .sandwich_check(j_max, grid, policy)?
            .relabel("essential_up_to_square");
        Ok((approx, s))
    }

    /// `ω(dt) - ω(ct) -> ∞`, gated on convexity and `(ω₆)`.
    pub fn strong_ratio_check(&self, c: f64, d: f64, grid: &Grid, policy: &Policy) -> Verdict {
        let name = "strong_ratio";
        if !(c > 0.0 && d > 0.0) {
            return Verdict::inconclusive(name, "c and d must be positive");
        }
        if !self.is_convex_weight(grid, policy).is(State::Holds) {
            return Verdict::inconclusive(name, "precondition: weight not certified convex");
        }
        let om6 = self.check_om6_weight(grid, policy);
        let h = match om6.witness("H") {
            Some(h) if om6.is(State::Holds) => h,
            _ => return Verdict::inconclusive(name, "precondition: (om6) not certified"),
        };
        let dom = self.domain_log_max();
        let (lc, ld) = (c.ln(), d.ln());
        let pts: Vec<f64> = self
            .eval_points(grid)
            .into_iter()
            .filter(|s| *s + lc.max(ld) <= dom && *s + lc.min(ld) >= self.domain_log_min())
            .collect();
        let ys: Vec<f64> = pts
            .iter()
            .map(|&s| self.omega_log(s + ld) - self.omega_log(s + lc))
            .collect();
        let lo = pts.first().copied().unwrap_or(0.0).max(0.0);
        let f = tail_fit(&pts, &ys, lo, policy);
        let mut v = match f.trend {
            Trend::Rising => Verdict::holds(name).with_witness("gap_end", f.last),
            Trend::Flat | Trend::Falling => Verdict::fails(name).with_evidence(f.argmax, f.max),
            _ => Verdict::inconclusive(name, format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("H", h)
        .with_witness("slope", f.slope);
        if d <= h * c {
            v = v.with_note("d <= Hc, outside the range where moderate growth gives the bound");
        }
        v
    }
}

impl LogWeight for Weight {
    fn omega_log(&self, s: f64) -> f64 {
        match &*self.node {
            Node::Sequence(a) => a.omega_log(s),
            Node::Exp(a) => a * s.exp(),
            Node::Poly(k) => {
                if s > 30.0 {
                    k * (s + (-s).exp().ln_1p())
                } else {
                    k * s.exp().ln_1p()
                }
            }
            Node::Table(t) => t.eval(s),
            Node::Dilate(w, c) => w.omega_log(s + c.ln()),
            Node::Power(w, c) => c * w.omega_log(s),
            Node::Normalize(w, shift) => {
                if s <= 0.0 {
                    0.0
                } else {
                    (w.omega_log(s) - shift).max(0.0)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct AssociatedSequence {
    /// Envelope-projected, exactly log-convex.
    pub seq: WeightSequence,
    /// Grid sups before projection.
    pub raw: Vec<f64>,
    /// `log t` where each sup was attained.
    pub argmax: Vec<f64>,
    /// Entries past this index are dominated by the grid end.
    pub reliable_j: usize,
    /// `max_j |raw_j - seq_j|`.
    pub projection: f64,
}

/// Nudge an envelope up by ulps where rounding left a quotient a hair below
/// its predecessor, so the exact log-convexity check passes.
fn exact_log_convex(y: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for j in 2..out.len() {
        let prev = out[j - 1] - out[j - 2];
        while out[j] - out[j - 1] < prev {
            out[j] = out[j].next_up();
        }
    }
    out
}

/// Trend of `ys` over the trailing half of `[lo, last point]`.
pub(crate) fn tail_fit(pts: &[f64], ys: &[f64], lo: f64, policy: &Policy) -> TrendFit {
    let Some(&hi) = pts.last() else {
        return trend::fit(&[], &[], policy);
    };
    let r = trend::trailing_half(pts, lo, hi);
    trend::fit(&pts[r.clone()], &ys[r], policy)
}
