use growthclass::associated::{recover_sequence, AssociatedWeight, LogWeight};
use growthclass::io;
use growthclass::sequence::WeightSequence;
use growthclass::{Grid, GridSpec, Policy, State};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::geometric(&GridSpec {
        t_min: 1e-2,
        t_max: 1e6,
        n: 800,
    })
}

/// Positive log-quotient increments give log-convex sequences.
fn convex_seq() -> impl Strategy<Value = WeightSequence> {
    (prop::collection::vec(0.0f64..1.5, 16..40), -2.0f64..1.0).prop_map(|(inc, start)| {
        let mut lmu = start;
        let mut y = vec![0.0];
        for d in inc {
            lmu += d;
            y.push(y.last().unwrap() + lmu);
        }
        WeightSequence::new("p", y).unwrap()
    })
}

fn any_seq() -> impl Strategy<Value = WeightSequence> {
    prop::collection::vec(-3.0f64..6.0, 16..40).prop_map(|steps| {
        let mut y = vec![0.0];
        for d in steps {
            y.push(y.last().unwrap() + d);
        }
        WeightSequence::new("q", y).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minorant_is_largest_convex_below(m in any_seq()) {
        let lc = m.log_convex_minorant();
        let y = m.log_values();
        let z = lc.log_values();
        for j in 0..y.len() {
            prop_assert!(z[j] <= y[j]);
        }
        prop_assert!(lc.is_log_convex_tol(1e-12));
        // hull vertices touch the input
        for v in m.hull_vertices() {
            prop_assert_eq!(z[v], y[v]);
        }
        let again = lc.log_convex_minorant();
        for (a, b) in again.log_values().iter().zip(z) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn omega_is_nondecreasing_and_convex_in_log_t(m in any_seq()) {
        let w = AssociatedWeight::new(m);
        let g = grid();
        let om: Vec<f64> = g.log_points().iter().map(|&s| w.omega_log(s)).collect();
        for k in 1..om.len() {
            prop_assert!(om[k] >= om[k - 1] - 1e-12);
        }
        for k in 1..om.len() - 1 {
            prop_assert!(2.0 * om[k] <= om[k - 1] + om[k + 1] + 1e-9 * om[k].abs().max(1.0));
        }
    }

    #[test]
    fn closed_form_matches_sup_scan(m in convex_seq()) {
        let w = AssociatedWeight::new(m);
        for &s in grid().log_points() {
            prop_assert!((w.omega_closed(s) - w.omega_sup_scan(s)).abs() <= 1e-12 * w.omega_sup_scan(s).abs().max(1.0));
        }
    }

    #[test]
    fn recovery_returns_minorant(m in any_seq()) {
        let lc = m.log_convex_minorant();
        let (rec, reliable) = recover_sequence(&AssociatedWeight::new(m), &grid(), &Policy::default());
        for j in 0..=reliable.min(lc.j_max()) {
            prop_assert!((rec[j] - lc.log(j)).abs() <= 1e-9 * lc.log(j).abs().max(1.0), "j = {}", j);
        }
    }

    #[test]
    fn sequence_file_roundtrip(m in any_seq()) {
        let mut buf = Vec::new();
        io::write_sequence(&m, &mut buf).unwrap();
        let back = io::parse_sequence("x", std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.log_values(), m.log_values());
    }

    #[test]
    fn preceq_is_reflexive(m in convex_seq()) {
        let p = Policy::default();
        prop_assert_eq!(m.seq_preceq(&m, &p).state, State::Holds);
        prop_assert_eq!(m.seq_triangle(&m, &p).state, State::Fails);
    }
}

#[test]
fn gevrey_orders_are_strict() {
    let p = Policy::default();
    let (a, b) = (
        WeightSequence::gevrey(1.0, 512),
        WeightSequence::gevrey(2.0, 512),
    );
    assert_eq!(a.seq_preceq(&b, &p).state, State::Holds);
    assert_eq!(b.seq_preceq(&a, &p).state, State::Fails);
    assert_eq!(a.seq_triangle(&b, &p).state, State::Holds);
}
