//! The comparison functions `θ_{M,c}(z) = Σ (cz)^j / (2^j M_j)` and
//! `θ^c_M(z) = Σ z^{cj} / (2^j M_j^c)`, evaluated on the positive axis in
//! the log domain, with a certified geometric tail past the truncation.

use std::sync::Arc;

use serde::Serialize;

use crate::associated::{AssociatedWeight, LogWeight};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::policy::Policy;
use crate::sequence::WeightSequence;
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ThetaKind {
    Dila(f64),
    /// Only positive integer exponents define an entire function here.
    Pow(u32),
}

#[derive(Clone, Debug)]
pub struct ThetaFunction {
    source: Arc<WeightSequence>,
    kind: ThetaKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaValue {
    pub log_theta: f64,
    /// Bound on the relative error contributed by the unseen tail.
    pub err_bar: f64,
}

impl ThetaFunction {
    pub fn new(source: WeightSequence, kind: ThetaKind) -> Result<Self> {
        match kind {
            ThetaKind::Dila(c) if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidSequence(format!(
                    "theta parameter c = {c} must be positive"
                )))
            }
            ThetaKind::Pow(0) => {
                return Err(Error::InvalidSequence(
                    "theta power c must be at least 1".into(),
                ))
            }
            _ => {}
        }
        if source.j_max() < 1 {
            return Err(Error::InvalidSequence(
                "theta needs at least two terms".into(),
            ));
        }
        Ok(ThetaFunction {
            source: Arc::new(source),
            kind,
        })
    }

    pub fn kind(&self) -> ThetaKind {
        self.kind
    }

    pub fn source(&self) -> &WeightSequence {
        &self.source
    }

    fn log_mu_last(&self) -> f64 {
        let j = self.source.j_max();
        self.source.log(j) - self.source.log(j - 1)
    }

    /// `t` must stay below this for the tail ratio to be under 1/2.
    pub fn t_limit(&self) -> f64 {
        match self.kind {
            ThetaKind::Dila(c) => self.log_mu_last().exp() / c,
            ThetaKind::Pow(_) => self.log_mu_last().exp(),
        }
    }

    /// `log |a_j|` for the power-series coefficients, `-∞` where zero.
    pub fn log_coeffs(&self) -> Vec<f64> {
        let m = self.source.log_values();
        match self.kind {
            ThetaKind::Dila(c) => {
                let r = (c / 2.0).ln();
                m.iter()
                    .enumerate()
                    .map(|(j, lm)| j as f64 * r - lm)
                    .collect()
            }
            ThetaKind::Pow(c) => {
                let c = c as usize;
                let mut out = vec![f64::NEG_INFINITY; c * (m.len() - 1) + 1];
                for (j, lm) in m.iter().enumerate() {
                    out[c * j] = -(j as f64) * std::f64::consts::LN_2 - c as f64 * lm;
                }
                out
            }
        }
    }

    /// Log-terms at `s = log t` and the log of the tail ratio past `J`.
    fn terms(&self, s: f64) -> (Vec<f64>, f64) {
        let m = self.source.log_values();
        let ln2 = std::f64::consts::LN_2;
        match self.kind {
            ThetaKind::Dila(c) => {
                let a = c.ln() + s - ln2;
                let t: Vec<f64> = m
                    .iter()
                    .enumerate()
                    .map(|(j, lm)| j as f64 * a - lm)
                    .collect();
                (t, a - self.log_mu_last())
            }
            ThetaKind::Pow(c) => {
                let c = c as f64;
                let t: Vec<f64> = m
                    .iter()
                    .enumerate()
                    .map(|(j, lm)| j as f64 * (c * s - ln2) - c * lm)
                    .collect();
                (t, c * (s - self.log_mu_last()) - ln2)
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<ThetaValue> {
        if t == 0.0 {
            return Ok(ThetaValue {
                log_theta: 0.0,
                err_bar: 0.0,
            });
        }
        if !(t > 0.0) || t >= self.t_limit() {
            return Err(Error::Range {
                t,
                limit: self.t_limit(),
            });
        }
        let (mut terms, log_r) = self.terms(t.ln());
        let last = *terms.last().unwrap();
        terms.sort_by(|a, b| b.total_cmp(a));
        let top = terms[0];
        let sum: f64 = terms.iter().map(|x| (x - top).exp()).sum();
        let log_theta = top + sum.ln();
        // tail <= term_J * r / (1 - r), relative to the partial sum
        let r = log_r.exp();
        let err_bar = (last - log_theta).exp() * r / (1.0 - r);
        Ok(ThetaValue { log_theta, err_bar })
    }
}

pub fn theta_eval(f: &ThetaFunction, t: f64) -> Result<ThetaValue> {
    f.eval(t)
}

/// `exp(ω_M(ct/2)) <= θ_{M,c}(t)` resp. `exp(c ω_M(t/2^{1/c})) <= θ^c_M(t)`
/// at every grid point inside the tail-certified range. The bound is
/// stated for all `t >= 0`; only the certified range is checked.
pub fn lower_bound_check(f: &ThetaFunction, grid: &Grid, policy: &Policy) -> Verdict {
    let name = "theta_lower_bound";
    let w = AssociatedWeight::from_arc(f.source.clone());
    let limit = f.t_limit().ln();
    let pts = grid.between(f64::NEG_INFINITY, limit);
    let pts = if pts.last().is_some_and(|s| *s >= limit) {
        &pts[..pts.len() - 1]
    } else {
        pts
    };
    if pts.is_empty() {
        return Verdict::inconclusive(name, "no grid point in the certified range");
    }
    let ln2 = std::f64::consts::LN_2;
    let mut min_margin = f64::INFINITY;
    for &s in pts {
        let lhs = match f.kind {
            ThetaKind::Dila(c) => w.omega_log(s + c.ln() - ln2),
            ThetaKind::Pow(c) => c as f64 * w.omega_log(s - ln2 / c as f64),
        };
        let v = match f.eval(s.exp()) {
            Ok(v) => v.log_theta,
            Err(e) => return Verdict::inconclusive(name, e.to_string()),
        };
        let margin = v - lhs;
        if margin < -policy.slack(lhs) {
            return Verdict::fails(name)
                .with_evidence(s, margin)
                .with_note("lower bound violated at a certified point");
        }
        min_margin = min_margin.min(margin);
    }
    Verdict::holds(name)
        .with_witness("points", pts.len() as f64)
        .with_witness("min_margin", min_margin)
        .with_witness("log_t_limit", limit)
        .with_note("checked on the tail-certified range only")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::verdict::State;

    fn fact() -> WeightSequence {
        WeightSequence::gevrey(1.0, 512)
    }

    #[test]
    fn factorial_gives_exp_half() {
        // Σ t^j / (2^j j!) = e^{t/2}
        let th = ThetaFunction::new(fact(), ThetaKind::Dila(1.0)).unwrap();
        for t in [1.0, 10.0, 100.0, 300.0] {
            let v = th.eval(t).unwrap();
            assert!(
                (v.log_theta - t / 2.0).abs() <= 1e-12 * (t / 2.0),
                "{t}: {v:?}"
            );
            assert!(v.err_bar < 1e-12);
        }
        assert_eq!(th.eval(0.0).unwrap().log_theta, 0.0);
    }

    #[test]
    fn pow_kind_on_factorial() {
        // θ^2 with M = j!: Σ t^{2j} / (2^j (j!)^2) = I_0(sqrt(2) t) (modified Bessel)
        let th = ThetaFunction::new(fact(), ThetaKind::Pow(2)).unwrap();
        let t: f64 = 3.0;
        let x = 2f64.sqrt() * t;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..60 {
            if k > 0 {
                term *= (x / 2.0).powi(2) / (k * k) as f64;
            }
            i0 += term;
        }
        assert!((th.eval(t).unwrap().log_theta - i0.ln()).abs() < 1e-13);
    }

    #[test]
    fn range_error_past_certificate() {
        let th = ThetaFunction::new(fact(), ThetaKind::Dila(2.0)).unwrap();
        assert!((th.t_limit() - 256.0).abs() < 1e-9);
        assert!(matches!(th.eval(300.0), Err(Error::Range { .. })));
        assert!(ThetaFunction::new(fact(), ThetaKind::Pow(0)).is_err());
        assert!(ThetaFunction::new(fact(), ThetaKind::Dila(-1.0)).is_err());
    }

    #[test]
    fn monotone_in_t() {
        let th =
            ThetaFunction::new(WeightSequence::q_gevrey(1.5, 128), ThetaKind::Dila(0.5)).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 1..200 {
            let t = i as f64 * th.t_limit() / 201.0;
            let v = th.eval(t).unwrap().log_theta;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn coefficients_match_eval() {
        let th = ThetaFunction::new(WeightSequence::gevrey(2.0, 64), ThetaKind::Pow(3)).unwrap();
        let a = th.log_coeffs();
        let t: f64 = 5.0;
        let direct: f64 = a
            .iter()
            .enumerate()
            .map(|(j, la)| (la + j as f64 * t.ln()).exp())
            .sum();
        assert!((th.eval(t).unwrap().log_theta - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn lower_bounds_on_gevrey() {
        let grid = Grid::geometric(&GridSpec::default());
        let p = Policy::default();
        for c in [0.5, 1.0, 2.0] {
            let th = ThetaFunction::new(fact(), ThetaKind::Dila(c)).unwrap();
            assert_eq!(lower_bound_check(&th, &grid, &p).state, State::Holds);
        }
        let th = ThetaFunction::new(fact(), ThetaKind::Pow(2)).unwrap();
        assert_eq!(lower_bound_check(&th, &grid, &p).state, State::Holds);
    }
}
