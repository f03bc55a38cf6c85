//! Weight sequences in the log domain and their sequence-level predicates.
//!
//! Every sequence is stored as `log M_j` for `j = 0..=J` with `log M_0 = 0`.
//! Asymptotic predicates are decided on the trailing half-window `[J/2, J]`
//! with `log j` as the trend abscissa.

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::trend::{self, Trend, TrendFit};
use crate::verdict::{State, Verdict};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSequence {
    pub label: String,
    log_values: Vec<f64>,
}

/// `log μ_j = log M_j - log M_{j-1}` with `log μ_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientSequence {
    pub log_quotients: Vec<f64>,
}

impl QuotientSequence {
    /// Prefix sums of the quotients. Exact when the sequence was itself
    /// built from quotients; otherwise equal up to accumulated rounding.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.log_quotients.len());
        out.push(0.0);
        for q in &self.log_quotients[1..] {
            acc += q;
            out.push(acc);
        }
        out
    }
}

/// `log j!` for `j = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..=n {
        acc += (j as f64).ln();
        out.push(acc);
    }
    out
}

impl WeightSequence {
    pub fn new(label: impl Into<String>, log_values: Vec<f64>) -> Result<Self> {
        if log_values.len() < 3 {
            return Err(Error::InvalidSequence(format!(
                "need at least 3 entries, got {}",
                log_values.len()
            )));
        }
        if let Some(j) = log_values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSequence(format!("entry {j} is not finite")));
        }
        if log_values[0] != 0.0 {
            return Err(Error::InvalidSequence(format!(
                "log M_0 must be 0, got {}",
                log_values[0]
            )));
        }
        Ok(WeightSequence {
            label: label.into(),
            log_values,
        })
    }

    /// `M_j = (j!)^s`.
    pub fn gevrey(s: f64, j_max: usize) -> Self {
        let lf = ln_factorials(j_max);
        let v = lf.iter().map(|x| s * x).collect();
        WeightSequence {
            label: format!("gevrey:{s}"),
            log_values: v,
        }
    }

    /// `M_j = q^{j^2}`.
    pub fn q_gevrey(q: f64, j_max: usize) -> Self {
        let lq = q.ln();
        let v = (0..=j_max).map(|j| (j * j) as f64 * lq).collect();
        WeightSequence {
            label: format!("q_gevrey:{q}"),
            log_values: v,
        }
    }

    /// Prefix products of the given quotients `μ_1, μ_2, ...`.
    pub fn from_quotients(label: impl Into<String>, mu: &[f64]) -> Result<Self> {
        if let Some(m) = mu.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidSequence(format!(
                "quotient {m} is not positive"
            )));
        }
        let logs: Vec<f64> = mu.iter().map(|m| m.ln()).collect();
        Self::from_log_quotients(label, &logs)
    }

    pub fn from_log_quotients(label: impl Into<String>, log_mu: &[f64]) -> Result<Self> {
        let mut v = Vec::with_capacity(log_mu.len() + 1);
        let mut acc = 0.0;
        v.push(0.0);
        for q in log_mu {
            acc += q;
            v.push(acc);
        }
        Self::new(label, v)
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// `log M_j`.
    pub fn log(&self, j: usize) -> f64 {
        self.log_values[j]
    }

    /// Truncation index `J`.
    pub fn j_max(&self) -> usize {
        self.log_values.len() - 1
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn truncate(&self, j_max: usize) -> Self {
        let j = j_max.min(self.j_max()).max(2);
        WeightSequence {
            label: self.label.clone(),
            log_values: self.log_values[..=j].to_vec(),
        }
    }

    /// Elementwise product `M_j N_j`.
    pub fn product(&self, other: &Self) -> Self {
        let j = self.j_max().min(other.j_max());
        let v = (0..=j).map(|k| self.log(k) + other.log(k)).collect();
        WeightSequence {
            label: format!("{}*{}", self.label, other.label),
            log_values: v,
        }
    }

    /// Geometric mean `(M_j N_j)^{1/2}`.
    pub fn mixture(&self, other: &Self) -> Self {
        let j = self.j_max().min(other.j_max());
        let v = (0..=j)
            .map(|k| 0.5 * (self.log(k) + other.log(k)))
            .collect();
        WeightSequence {
            label: format!("({}+{})/2", self.label, other.label),
            log_values: v,
        }
    }

    pub fn quotients(&self) -> QuotientSequence {
        let mut q = Vec::with_capacity(self.log_values.len());
        q.push(0.0);
        for w in self.log_values.windows(2) {
            q.push(w[1] - w[0]);
        }
        QuotientSequence { log_quotients: q }
    }

    /// Exact check that `μ_j` is non-decreasing for `j >= 1`.
    pub fn is_log_convex(&self) -> Verdict {
        let q = self.quotients().log_quotients;
        for j in 2..q.len() {
            if q[j] < q[j - 1] {
                return Verdict::fails("log_convex")
                    .with_evidence(j as f64, q[j] - q[j - 1])
                    .with_witness("j", j as f64)
                    .with_note(format!("mu_{j} < mu_{}", j - 1));
            }
        }
        Verdict::holds("log_convex").with_witness("J", self.j_max() as f64)
    }

    pub fn log_convex(&self) -> bool {
        self.is_log_convex().is(State::Holds)
    }

    /// Log-convexity up to rounding: second differences of `log M` may dip
    /// below zero by `rel` times the local magnitude. Interpolated data
    /// (envelopes, recovered sequences) only satisfies this form.
    pub fn is_log_convex_tol(&self, rel: f64) -> bool {
        let y = &self.log_values;
        y.windows(3).all(|w| {
            let scale = w[0].abs().max(w[1].abs()).max(w[2].abs()).max(1.0);
            w[2] - 2.0 * w[1] + w[0] >= -rel * scale
        })
    }

    /// Trend fit of `d(j)` against `log j` over `j` in `[lo, hi]`.
    fn fit_window(
        &self,
        lo: usize,
        hi: usize,
        d: impl Fn(usize) -> f64,
        policy: &Policy,
    ) -> TrendFit {
        let lo = lo.max(1);
        let xs: Vec<f64> = (lo..=hi).map(|j| (j as f64).ln()).collect();
        let ys: Vec<f64> = (lo..=hi).map(d).collect();
        trend::fit(&xs, &ys, policy)
    }

    fn trailing(&self) -> (usize, usize) {
        let j = self.j_max();
        (j / 2, j)
    }

    /// Log-convex, `M_1 >= 1`, and `(M_j)^{1/j}` diverging on the window.
    pub fn is_lc(&self, policy: &Policy) -> Verdict {
        let lc = self.is_log_convex();
        if !lc.is(State::Holds) {
            return lc.with_note("not log-convex").relabel("LC");
        }
        if self.log(1) < 0.0 {
            return Verdict::fails("LC")
                .with_evidence(1.0, self.log(1))
                .with_note("normalization M_1 >= 1 violated");
        }
        let (lo, hi) = self.trailing();
        let f = self.fit_window(lo, hi, |j| self.log(j) / j as f64, policy);
        let v = match f.trend {
            Trend::Rising => Verdict::holds("LC"),
            Trend::Flat | Trend::Falling => {
                Verdict::fails("LC").with_note("root sequence does not diverge on the window")
            }
            _ => Verdict::inconclusive(
                "LC",
                "log-convex and normalized, divergence trend undecided",
            ),
        };
        v.with_witness("root_slope", f.slope)
            .with_evidence(hi as f64, f.last)
    }

    /// Lower convex envelope of `(j, log M_j)`, collinear points kept.
    pub fn log_convex_minorant(&self) -> WeightSequence {
        let y = &self.log_values;
        let hull = lower_hull(y);
        let mut out = y.clone();
        for w in hull.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (i, o) in out.iter_mut().enumerate().take(b).skip(a + 1) {
                *o = chord(y, a, b, i);
            }
        }
        WeightSequence {
            label: format!("lc({})", self.label),
            log_values: out,
        }
    }

    /// Vertices of the lower hull, as indices.
    pub fn hull_vertices(&self) -> Vec<usize> {
        lower_hull(&self.log_values)
    }

    /// Moderate growth via the running maximum of
    /// `(log M_{j+k} - log M_j - log M_k)/(j+k)`.
    pub fn check_mg(&self, policy: &Policy) -> Verdict {
        let jm = self.j_max();
        let mut running = vec![0.0f64; jm + 1];
        let mut exps = vec![0.0f64; jm + 1];
        let mut best = 0.0f64;
        for n in 2..=jm {
            let mut e = 0.0f64;
            for j in 1..=n / 2 {
                let v = (self.log(n) - self.log(j) - self.log(n - j)) / n as f64;
                e = e.max(v);
            }
            exps[n] = e;
            best = best.max(e);
            running[n] = best;
        }
        let (lo, hi) = self.trailing();
        let f = self.fit_window(lo, hi, |n| running[n], policy);
        let c = best.exp();
        match f.trend {
            Trend::Flat | Trend::Falling => Verdict::holds("mg").with_witness("C", c),
            Trend::Rising => Verdict::fails("mg")
                .with_evidence(hi as f64, exps[hi])
                .with_witness("C_window", c)
                .with_note("moderate-growth exponent diverges"),
            _ => Verdict::inconclusive("mg", format!("exponent slope {:.3e} in the band", f.slope))
                .with_witness("C_window", c),
        }
        .with_witness("slope", f.slope)
    }

    /// `M_{2j} <= C^2 c^{-2j} M_j^2`, via boundedness of
    /// `(log M_{2j} - 2 log M_j)/(2j)`.
    pub fn check_mg_diag(&self, policy: &Policy) -> Verdict {
        let half = self.j_max() / 2;
        let d = |j: usize| (self.log(2 * j) - 2.0 * self.log(j)) / (2 * j) as f64;
        let f = self.fit_window(half / 2, half, d, policy);
        let sup = (1..=half).map(d).fold(0.0f64, f64::max);
        match f.trend {
            Trend::Flat | Trend::Falling => Verdict::holds("mg_diag")
                .with_witness("C", 1.0)
                .with_witness("c", (-sup).exp()),
            Trend::Rising => Verdict::fails("mg_diag")
                .with_evidence(half as f64, d(half))
                .with_note("diagonal exponent diverges"),
            _ => Verdict::inconclusive("mg_diag", format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("slope", f.slope)
    }

    /// `liminf (M_{Lj})^{1/(Lj)} / (M_j)^{1/j} > 1` for some `L <= l_max`.
    pub fn check_om1_index(&self, policy: &Policy) -> Verdict {
        let jm = self.j_max();
        let thr = (1.0 + policy.margin).ln();
        let mut all_below = true;
        for l in 2..=policy.l_max as usize {
            let hi = jm / l;
            let lo = ((jm + 2 * l - 1) / (2 * l)).max(1);
            if hi < lo {
                continue;
            }
            let r = |j: usize| self.log(l * j) / (l * j) as f64 - self.log(j) / j as f64;
            let inf = (lo..=hi).map(r).fold(f64::INFINITY, f64::min);
            let sup = (lo..=hi).map(r).fold(f64::NEG_INFINITY, f64::max);
            if inf > thr {
                return Verdict::holds("om1_index")
                    .with_witness("L", l as f64)
                    .with_evidence(lo as f64, inf.exp());
            }
            if sup > thr {
                all_below = false;
            }
        }
        if all_below {
            Verdict::fails("om1_index")
                .with_witness("L_max", policy.l_max as f64)
                .with_note("ratio tends to 1 for every tested L")
        } else {
            Verdict::inconclusive("om1_index", "ratio straddles the threshold")
        }
    }

    /// `M ≼ N`: `(log M_j - log N_j)/j` bounded above.
    pub fn seq_preceq(&self, other: &Self, policy: &Policy) -> Verdict {
        let jm = self.j_max().min(other.j_max());
        let d = |j: usize| (self.log(j) - other.log(j)) / j as f64;
        let f = self.fit_window(jm / 2, jm, d, policy);
        let sup = (1..=jm).map(d).fold(f64::NEG_INFINITY, f64::max);
        match f.trend {
            Trend::Flat | Trend::Falling => {
                Verdict::holds("seq_preceq").with_witness("h", sup.exp())
            }
            Trend::Rising => Verdict::fails("seq_preceq").with_evidence(jm as f64, d(jm)),
            _ => Verdict::inconclusive("seq_preceq", format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("slope", f.slope)
    }

    /// `M_j <= A N_j`: `log M_j - log N_j` bounded above.
    pub fn bounded_by(&self, other: &Self, policy: &Policy) -> Verdict {
        let jm = self.j_max().min(other.j_max());
        let d = |j: usize| self.log(j) - other.log(j);
        let f = self.fit_window(jm / 2, jm, d, policy);
        let sup = (0..=jm).map(d).fold(f64::NEG_INFINITY, f64::max);
        match f.trend {
            Trend::Flat | Trend::Falling => {
                Verdict::holds("seq_bounded").with_witness("A", sup.max(0.0).exp())
            }
            Trend::Rising => Verdict::fails("seq_bounded").with_evidence(jm as f64, d(jm)),
            _ => Verdict::inconclusive("seq_bounded", format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("slope", f.slope)
    }

    pub fn seq_approx(&self, other: &Self, policy: &Policy) -> Verdict {
        let a = self.seq_preceq(other, policy);
        let b = other.seq_preceq(self, policy);
        let state = a.state.and(b.state);
        Verdict::new("seq_approx", state)
            .with_witness("forward", a.witness("h").unwrap_or(f64::NAN))
            .with_witness("backward", b.witness("h").unwrap_or(f64::NAN))
            .with_sides(vec![a, b])
    }

    /// `M ⊲ N`: `(M_j/N_j)^{1/j} -> 0`.
    pub fn seq_triangle(&self, other: &Self, policy: &Policy) -> Verdict {
        let jm = self.j_max().min(other.j_max());
        let d = |j: usize| (self.log(j) - other.log(j)) / j as f64;
        let f = self.fit_window(jm / 2, jm, d, policy);
        match f.trend {
            Trend::Falling => {
                Verdict::holds("seq_triangle").with_witness("root_ratio_J", f.last.exp())
            }
            Trend::Flat | Trend::Rising => Verdict::fails("seq_triangle")
                .with_evidence(jm as f64, f.last)
                .with_note("root ratio bounded below on the window"),
            _ => {
                Verdict::inconclusive("seq_triangle", format!("slope {:.3e} in the band", f.slope))
            }
        }
        .with_witness("slope", f.slope)
    }

    /// `(M_{cj})^{1/c}`, truncated at `floor(J/c)`.
    pub fn tilde(&self, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidSequence("tilde needs c >= 1".into()));
        }
        let n = self.j_max() / c;
        let v = (0..=n).map(|j| self.log(c * j) / c as f64).collect();
        Self::new(format!("tilde{c}({})", self.label), v)
    }

    /// `c^{-j} N_j`.
    pub fn scale_pow(&self, c: f64) -> Self {
        let lc = c.ln();
        let v = self
            .log_values
            .iter()
            .enumerate()
            .map(|(j, x)| x - j as f64 * lc)
            .collect();
        WeightSequence {
            label: format!("scale{c}({})", self.label),
            log_values: v,
        }
    }

    /// `M_{2j} <= A B^j M_j`. Genuine weight sequences must fail this.
    pub fn check_strong_2j(&self, policy: &Policy) -> Verdict {
        let half = self.j_max() / 2;
        let d = |j: usize| (self.log(2 * j) - self.log(j)) / j as f64;
        let f = self.fit_window(half / 2, half, d, policy);
        let sup = (1..=half).map(d).fold(f64::NEG_INFINITY, f64::max);
        match f.trend {
            Trend::Flat | Trend::Falling => Verdict::holds("strong_2j")
                .with_witness("A", 1.0)
                .with_witness("B", sup.exp()),
            Trend::Rising => Verdict::fails("strong_2j")
                .with_evidence(half as f64, d(half))
                .with_note("forces bounded roots; contradicts a weight sequence"),
            _ => Verdict::inconclusive("strong_2j", format!("slope {:.3e} in the band", f.slope)),
        }
        .with_witness("slope", f.slope)
    }

    /// `m_{2j} <= D h^j (m_{Cj})^{1/C}` with `m_j = M_j/j!`.
    pub fn check_56_alternative(&self, policy: &Policy) -> Verdict {
        let jm = self.j_max();
        let lf = ln_factorials(jm);
        let m = |j: usize| self.log(j) - lf[j];
        let mut all_rising = true;
        for c in 1..=policy.c_max as usize {
            let hi = jm / c.max(2);
            if hi < 2 {
                break;
            }
            let d = |j: usize| (m(2 * j) - m(c * j) / c as f64) / j as f64;
            let f = self.fit_window(hi / 2, hi, d, policy);
            match f.trend {
                Trend::Flat | Trend::Falling => {
                    let sup = (1..=hi).map(d).fold(0.0f64, f64::max);
                    return Verdict::holds("alt_2j")
                        .with_witness("C", c as f64)
                        .with_witness("D", 1.0)
                        .with_witness("h", sup.exp());
                }
                Trend::Rising => {}
                _ => all_rising = false,
            }
        }
        if all_rising {
            Verdict::fails("alt_2j")
                .with_witness("C_max", policy.c_max as f64)
                .with_note("diverges for every tested C")
        } else {
            Verdict::inconclusive("alt_2j", "no C certified, some undecided")
        }
    }
}

impl Verdict {
    pub(crate) fn relabel(mut self, relation: &str) -> Self {
        self.relation = relation.to_string();
        self
    }
}

/// Shared chord formula; the brute-force oracle must use the same one.
pub fn chord(y: &[f64], a: usize, b: usize, i: usize) -> f64 {
    y[a] + (y[b] - y[a]) * (i - a) as f64 / (b - a) as f64
}

fn lower_hull(y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b is strictly above the chord a-i
            let cross = (b - a) as f64 * (y[i] - y[a]) - (y[b] - y[a]) * (i - a) as f64;
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> WeightSequence {
        WeightSequence::new("t", v.to_vec()).unwrap()
    }

    fn lin(m: &[f64]) -> WeightSequence {
        seq(&m.iter().map(|x| x.ln()).collect::<Vec<_>>())
    }

    #[test]
    fn quotients_of_factorial() {
        let q = WeightSequence::gevrey(1.0, 5).quotients();
        let mu: Vec<f64> = q.log_quotients.iter().map(|x| x.exp()).collect();
        for (a, b) in mu.iter().zip([1.0, 1.0, 2.0, 3.0, 4.0, 5.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let q2 = WeightSequence::q_gevrey(2.0, 3).quotients();
        assert!((q2.log_quotients[3].exp() - 32.0).abs() < 1e-9);
        let c = seq(&[0.0; 6]).quotients();
        assert!(c.log_quotients.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn constructors() {
        assert!((WeightSequence::gevrey(1.0, 6).log(4).exp() - 24.0).abs() < 1e-9);
        assert!((WeightSequence::q_gevrey(2.0, 6).log(3).exp() - 512.0).abs() < 1e-9);
        let f = WeightSequence::from_quotients("f", &[1.0, 2.0, 3.0]).unwrap();
        let m: Vec<f64> = f.log_values().iter().map(|x| x.exp()).collect();
        assert_eq!(m.len(), 4);
        for (a, b) in m.iter().zip([1.0, 1.0, 2.0, 6.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(WeightSequence::new("x", vec![0.0, 1.0]).is_err());
        assert!(WeightSequence::new("x", vec![0.1, 1.0, 2.0]).is_err());
        assert!(WeightSequence::new("x", vec![0.0, f64::NAN, 2.0]).is_err());
    }

    #[test]
    fn quotient_roundtrip_exact_for_quotient_built() {
        let f = WeightSequence::from_log_quotients("f", &[0.3, 0.7, 1.1, 2.9]).unwrap();
        assert_eq!(f.quotients().reconstruct(), f.log_values());
    }

    #[test]
    fn log_convexity() {
        assert!(WeightSequence::gevrey(1.0, 64).log_convex());
        assert!(WeightSequence::gevrey(0.5, 64).log_convex());
        let v = lin(&[1.0, 10.0, 20.0, 200.0]).is_log_convex();
        assert_eq!(v.state, State::Fails);
        assert_eq!(v.witness("j"), Some(2.0));
    }

    #[test]
    fn lc_class() {
        let p = Policy::default();
        assert_eq!(
            WeightSequence::gevrey(1.0, 512).is_lc(&p).state,
            State::Holds
        );
        let geo = seq(&(0..=512).map(|j| j as f64 * 2f64.ln()).collect::<Vec<_>>());
        assert_ne!(geo.is_lc(&p).state, State::Holds);
        let dec = seq(&(0..=512)
            .map(|j| -(j as f64) * 2f64.ln())
            .collect::<Vec<_>>());
        assert_eq!(dec.is_lc(&p).state, State::Fails);
    }

    #[test]
    fn minorant_of_small_example() {
        let m = lin(&[1.0, 10.0, 20.0, 200.0]);
        let lc = m.log_convex_minorant();
        // hull vertices 0, 2, 3: index 1 drops onto the chord to (2, log 20)
        assert_eq!(m.hull_vertices(), vec![0, 2, 3]);
        assert!((lc.log(1) - 0.5 * 20f64.ln()).abs() < 1e-12);
        assert_eq!(lc.log(2), m.log(2));
        assert_eq!(lc.log(3), m.log(3));
        assert!(lc.is_log_convex_tol(1e-12));
    }

    #[test]
    fn mg_examples() {
        let p = Policy::default();
        let g2 = WeightSequence::gevrey(2.0, 256);
        let v = g2.check_mg(&p);
        assert_eq!(v.state, State::Holds);
        assert!(v.witness("C").unwrap() <= 4.0 + 1e-9);
        assert_eq!(
            WeightSequence::q_gevrey(1.5, 256).check_mg(&p).state,
            State::Fails
        );
        let one = seq(&[0.0; 64]).check_mg(&p);
        assert_eq!(one.state, State::Holds);
        assert_eq!(one.witness("C"), Some(1.0));
    }

    #[test]
    fn mg_diag_examples() {
        let p = Policy::default();
        for s in [0.5, 1.0, 2.0, 3.0] {
            assert_eq!(
                WeightSequence::gevrey(s, 512).check_mg_diag(&p).state,
                State::Holds
            );
        }
        for q in [1.5, 2.0] {
            assert_eq!(
                WeightSequence::q_gevrey(q, 512).check_mg_diag(&p).state,
                State::Fails
            );
        }
        let geo = seq(&(0..=64).map(|j| j as f64 * 2f64.ln()).collect::<Vec<_>>());
        let v = geo.check_mg_diag(&p);
        assert_eq!(v.state, State::Holds);
        assert_eq!(v.witness("C"), Some(1.0));
        assert_eq!(v.witness("c"), Some(1.0));
    }

    #[test]
    fn om1_index_examples() {
        let p = Policy::default();
        let f = WeightSequence::gevrey(1.0, 512).check_om1_index(&p);
        assert_eq!(f.state, State::Holds);
        assert_eq!(f.witness("L"), Some(2.0));
        let h = WeightSequence::gevrey(0.5, 512).check_om1_index(&p);
        assert_eq!(h.witness("L"), Some(2.0));
        let geo = seq(&(0..=512).map(|j| j as f64 * 2f64.ln()).collect::<Vec<_>>());
        assert_eq!(geo.check_om1_index(&p).state, State::Fails);
    }

    #[test]
    fn om1_ratio_matches_stirling() {
        // brute-force ratio on j = 64..128 for j!, L = 2: tends to 2
        let m = WeightSequence::gevrey(1.0, 256);
        for j in 64..=128 {
            let r = (m.log(2 * j) / (2 * j) as f64 - m.log(j) / j as f64).exp();
            assert!(r > 1.9 && r < 2.0, "j={j} r={r}");
        }
    }

    #[test]
    fn triangle_and_preceq() {
        let p = Policy::default();
        let f = WeightSequence::gevrey(1.0, 512);
        let f2 = WeightSequence::gevrey(2.0, 512);
        assert_eq!(f.seq_triangle(&f2, &p).state, State::Holds);
        assert_eq!(f.seq_preceq(&f2, &p).state, State::Holds);
        assert_eq!(f2.seq_preceq(&f, &p).state, State::Fails);
        assert_eq!(f.seq_triangle(&f, &p).state, State::Fails);
        assert_eq!(f.seq_approx(&f, &p).state, State::Holds);
        let shifted = f.scale_pow(0.5);
        assert_eq!(shifted.seq_triangle(&f, &p).state, State::Fails);
    }

    #[test]
    fn tilde_and_scale() {
        let f = WeightSequence::gevrey(1.0, 10);
        assert_eq!(f.tilde(1).unwrap().log_values(), f.log_values());
        let t = f.tilde(2).unwrap();
        assert!((t.log(2) - 24f64.sqrt().ln()).abs() < 1e-12);
        assert_eq!(t.j_max(), 5);
        assert!((f.scale_pow(2.0).log(3).exp() - 6.0 / 8.0).abs() < 1e-12);
        assert_eq!(f.scale_pow(1.0).log_values(), f.log_values());
    }

    #[test]
    fn strong_2j_examples() {
        let p = Policy::default();
        assert_eq!(
            WeightSequence::gevrey(1.0, 512).check_strong_2j(&p).state,
            State::Fails
        );
        assert_eq!(
            WeightSequence::gevrey(2.0, 512).check_strong_2j(&p).state,
            State::Fails
        );
        let geo = seq(&(0..=512).map(|j| j as f64 * 2f64.ln()).collect::<Vec<_>>());
        let v = geo.check_strong_2j(&p);
        assert_eq!(v.state, State::Holds);
        assert!((v.witness("B").unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn alternative_2j_examples() {
        let p = Policy::default();
        let v = WeightSequence::gevrey(1.0, 512).check_56_alternative(&p);
        assert_eq!(v.state, State::Holds);
        assert_eq!(v.witness("C"), Some(1.0));
        assert_eq!(v.witness("h"), Some(1.0));
        // (m_{Cj})^{1/C} carries q^{C j^2}, which outgrows m_{2j} ~ q^{4 j^2} from C = 4 on
        let q = WeightSequence::q_gevrey(2.0, 512).check_56_alternative(&p);
        assert_eq!(q.state, State::Holds);
        assert_eq!(q.witness("C"), Some(4.0));
        // m_j = j!: (2j)! against ((Cj)!)^{1/C} ~ (Cj/e)^j diverges for every C
        assert_eq!(
            WeightSequence::gevrey(2.0, 512)
                .check_56_alternative(&p)
                .state,
            State::Fails
        );
    }

    #[test]
    fn superadditivity_of_battery_bases() {
        for m in [
            WeightSequence::gevrey(0.5, 128),
            WeightSequence::q_gevrey(1.5, 128),
        ] {
            for j in 0..=64 {
                for k in 0..=64 {
                    assert!(m.log(j) + m.log(k) <= m.log(j + k) + 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn minorant_properties(v in prop::collection::vec(-5.0f64..5.0, 3..40)) {
            let mut v = v;
            v[0] = 0.0;
            let m = seq(&v);
            let lc = m.log_convex_minorant();
            prop_assert!(lc.is_log_convex_tol(1e-12));
            for j in 0..v.len() {
                prop_assert!(lc.log(j) <= m.log(j));
            }
            let again = lc.log_convex_minorant();
            for j in 0..v.len() {
                prop_assert!((again.log(j) - lc.log(j)).abs() <= 1e-12 * (1.0 + lc.log(j).abs()));
            }
        }

        #[test]
        fn scale_pow_composes(a in 0.1f64..10.0, b in 0.1f64..10.0) {
            let f = WeightSequence::gevrey(1.0, 20);
            let x = f.scale_pow(a).scale_pow(b);
            let y = f.scale_pow(a * b);
            for j in 0..=20 {
                prop_assert!((x.log(j) - y.log(j)).abs() < 1e-9);
            }
        }

        #[test]
        fn triangle_implies_preceq(s in 0.3f64..3.0, t in 0.3f64..3.0) {
            let p = Policy::default();
            let m = WeightSequence::gevrey(s, 256);
            let n = WeightSequence::gevrey(t, 256);
            if m.seq_triangle(&n, &p).is(State::Holds) {
                prop_assert!(m.seq_preceq(&n, &p).is(State::Holds));
            }
        }
    }
}
