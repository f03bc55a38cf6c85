//! Evaluation abscissae, stored as `s = log t`.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t_min: 1e-3,
            t_max: 1e9,
            n: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    log_t: Vec<f64>,
    pub knot_augmented: bool,
}

impl Grid {
    pub fn geometric(spec: &GridSpec) -> Grid {
        let (a, b) = (spec.t_min.ln(), spec.t_max.ln());
        let n = spec.n.max(2);
        let log_t = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        Grid {
            log_t,
            knot_augmented: false,
        }
    }

    pub fn from_log_points(mut pts: Vec<f64>) -> Grid {
        pts.retain(|x| !x.is_nan());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Grid {
            log_t: pts,
            knot_augmented: false,
        }
    }

    /// Merge in the given log-knots that fall inside the grid's range.
    pub fn with_knots(&self, knots: &[f64]) -> Grid {
        let (lo, hi) = (self.log_min(), self.log_max());
        let mut pts = self.log_t.clone();
        pts.extend(knots.iter().copied().filter(|k| *k >= lo && *k <= hi));
        let mut g = Grid::from_log_points(pts);
        g.knot_augmented = true;
        g
    }

    /// Merge in every given knot, extending past the grid's end if needed.
    pub fn with_all_knots(&self, knots: &[f64]) -> Grid {
        let mut pts = self.log_t.clone();
        pts.extend(knots.iter().copied().filter(|k| k.is_finite()));
        let mut g = Grid::from_log_points(pts);
        g.knot_augmented = true;
        g
    }

    pub fn log_points(&self) -> &[f64] {
        &self.log_t
    }

    pub fn len(&self) -> usize {
        self.log_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_t.is_empty()
    }

    pub fn log_min(&self) -> f64 {
        self.log_t.first().copied().unwrap_or(f64::NAN)
    }

    pub fn log_max(&self) -> f64 {
        self.log_t.last().copied().unwrap_or(f64::NAN)
    }

    /// Points with `lo <= s <= hi`.
    pub fn between(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.log_t.partition_point(|x| *x < lo);
        let b = self.log_t.partition_point(|x| *x <= hi);
        &self.log_t[a..b.max(a)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_endpoints() {
        let g = Grid::geometric(&GridSpec::default());
        assert_eq!(g.len(), 4096);
        assert!((g.log_min() - 1e-3f64.ln()).abs() < 1e-12);
        assert!((g.log_max() - 1e9f64.ln()).abs() < 1e-12);
        assert!(g.log_points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn knots_are_merged_and_clipped() {
        let g = Grid::geometric(&GridSpec {
            t_min: 1.0,
            t_max: 10.0,
            n: 3,
        });
        let k = g.with_knots(&[0.5, 100.0, 1.0]);
        assert!(k.knot_augmented);
        assert_eq!(k.len(), 5);
        assert_eq!(g.with_all_knots(&[100.0]).log_max(), 100.0);
        assert_eq!(k.between(0.4, 1.1), &[0.5, 1.0]);
    }
}
