//! Least-squares trend classification on trailing windows.
//!
//! Finite data cannot certify a limit. A diagnostic is called Rising when
//! its fitted slope exceeds twice the margin, Flat when the slope stays
//! within the margin, Falling symmetrically, and Unclear in the gaps.

use crate::policy::Policy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Rising,
    Flat,
    Falling,
    Unclear,
    TooShort,
}

/// Minimal number of window points for a fitted slope to mean anything.
pub const MIN_POINTS: usize = 6;

pub fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

pub fn classify_slope(s: f64, margin: f64) -> Trend {
    if !s.is_finite() {
        return if s > 0.0 {
            Trend::Rising
        } else if s < 0.0 {
            Trend::Falling
        } else {
            Trend::Unclear
        };
    }
    if s.abs() <= margin {
        Trend::Flat
    } else if s >= 2.0 * margin {
        Trend::Rising
    } else if s <= -2.0 * margin {
        Trend::Falling
    } else {
        Trend::Unclear
    }
}

#[derive(Clone, Debug)]
pub struct TrendFit {
    pub trend: Trend,
    pub slope: f64,
    pub max: f64,
    pub argmax: f64,
    pub last: f64,
}

pub fn fit(xs: &[f64], ys: &[f64], policy: &Policy) -> TrendFit {
    let (mut max, mut argmax) = (f64::NEG_INFINITY, f64::NAN);
    for (x, y) in xs.iter().zip(ys) {
        if *y > max {
            max = *y;
            argmax = *x;
        }
    }
    let last = ys.last().copied().unwrap_or(f64::NAN);
    if xs.len() < MIN_POINTS {
        return TrendFit {
            trend: Trend::TooShort,
            slope: f64::NAN,
            max,
            argmax,
            last,
        };
    }
    match slope(xs, ys) {
        Some(s) => TrendFit {
            trend: classify_slope(s, policy.margin),
            slope: s,
            max,
            argmax,
            last,
        },
        None => TrendFit {
            trend: Trend::TooShort,
            slope: f64::NAN,
            max,
            argmax,
            last,
        },
    }
}

/// Indices of the trailing half of a sorted abscissa range: points with
/// `x >= (x_lo + x_hi) / 2`.
pub fn trailing_half(xs: &[f64], x_lo: f64, x_hi: f64) -> std::ops::Range<usize> {
    let mid = 0.5 * (x_lo + x_hi);
    let start = xs.partition_point(|x| *x < mid);
    let end = xs.partition_point(|x| *x <= x_hi);
    start..end.max(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((slope(&xs, &ys).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn classification_bands() {
        assert_eq!(classify_slope(0.0, 0.05), Trend::Flat);
        assert_eq!(classify_slope(0.07, 0.05), Trend::Unclear);
        assert_eq!(classify_slope(0.2, 0.05), Trend::Rising);
        assert_eq!(classify_slope(-0.2, 0.05), Trend::Falling);
    }

    #[test]
    fn short_windows_are_flagged() {
        let p = Policy::default();
        let f = fit(&[1.0, 2.0], &[1.0, 5.0], &p);
        assert_eq!(f.trend, Trend::TooShort);
        assert_eq!(f.max, 5.0);
    }

    #[test]
    fn trailing_half_bounds() {
        let xs: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(trailing_half(&xs, 0.0, 10.0), 5..11);
        assert_eq!(trailing_half(&xs, 0.0, 4.0), 2..5);
    }
}
