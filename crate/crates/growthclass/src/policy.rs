//! Tunable parameters for the finite-window deciders.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Policy {
    /// Slope threshold separating "bounded" from "diverging".
    pub margin: f64,
    /// Index search bound for the (om1) index condition.
    pub l_max: u32,
    /// Index search bound for the alternative 2j condition.
    pub c_max: u32,
    /// Ladder for H in the (om6) checks and L in the (om1) checks.
    pub h_ladder: Vec<f64>,
    /// Ascending parameters for existentially quantified relations.
    pub exists_ladder: Vec<f64>,
    /// Descending parameters for universally quantified relations.
    pub forall_ladder: Vec<f64>,
    /// Number of leading rungs of a universal ladder that must be resolved
    /// before a deeper failing rung is read as the truncation limit.
    pub forall_min_depth: usize,
    /// Fraction of the counting function at the grid end that is trusted
    /// for Legendre recovery.
    pub reliable_safety: f64,
    pub convex_tol_closed: f64,
    pub convex_tol_table: f64,
    /// Slack for inequalities that hold exactly in real arithmetic.
    pub round_tol: f64,
}

impl Default for Policy {
    fn default() -> Self {
        let doubling: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
        Policy {
            margin: 0.05,
            l_max: 16,
            c_max: 16,
            h_ladder: doubling[1..].to_vec(),
            exists_ladder: doubling.clone(),
            forall_ladder: doubling.iter().map(|c| 1.0 / c).collect(),
            forall_min_depth: 1,
            reliable_safety: 0.5,
            convex_tol_closed: 1e-9,
            convex_tol_table: 1e-6,
            round_tol: 1e-12,
        }
    }
}

impl Policy {
    /// `|a - b|` small relative to the larger magnitude (floor 1).
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.round_tol * a.abs().max(b.abs()).max(1.0)
    }

    pub fn slack(&self, x: f64) -> f64 {
        self.round_tol * x.abs().max(1.0)
    }
}
