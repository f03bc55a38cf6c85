//! Named end-to-end check suites over the standard battery. Each returns a
//! report listing every failed item; `passed` means the list is empty.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::associated::{check_om1_omega, check_om6_omega, recover_sequence, AssociatedWeight};
use crate::battery::{Kind as BatteryKind, Member};
use crate::error::{Error, Result};
use crate::family::Source;
use crate::grid::Grid;
use crate::policy::Policy;
use crate::relations::{bridge_pow_seq, bridge_triangle_seq};
use crate::sequence::WeightSequence;
use crate::spaces::{membership, system_equiv, Flavor, PowerSeries, SpaceSpec};
use crate::theta::{lower_bound_check, ThetaFunction, ThetaKind};
use crate::verdict::{contradicts, State, Verdict};
use crate::weight::Weight;

pub const NAMES: [&str; 10] = [
    "roundtrip",
    "minorant",
    "dual-omega",
    "cross-chains",
    "theta",
    "fixed-point",
    "bridges",
    "falsification",
    "system-equiv",
    "membership",
];

pub const MINORANT_SEED: u64 = 0x6c63_6d69;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
    pub stats: BTreeMap<String, f64>,
}

impl SuiteReport {
    fn new(name: &str, checked: usize, failures: Vec<String>) -> Self {
        SuiteReport {
            name: name.into(),
            passed: failures.is_empty(),
            checked,
            failures,
            stats: BTreeMap::new(),
        }
    }

    fn stat(mut self, k: &str, v: f64) -> Self {
        self.stats.insert(k.into(), v);
        self
    }
}

/// Runs one suite, or every suite for `all`, on the given battery. The
/// system-equivalence suite uses only its pure Gevrey and q-Gevrey members.
pub fn run(
    name: &str,
    members: &[Member],
    j_max: usize,
    grid: &Grid,
    policy: &Policy,
) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return NAMES
            .iter()
            .map(|n| run_one(n, members, j_max, grid, policy))
            .collect();
    }
    Ok(vec![run_one(name, members, j_max, grid, policy)?])
}

fn run_one(
    name: &str,
    members: &[Member],
    j_max: usize,
    grid: &Grid,
    policy: &Policy,
) -> Result<SuiteReport> {
    let lc = || lc_members(members.to_vec(), policy);
    Ok(match name {
        "roundtrip" => roundtrip(&lc(), grid, policy),
        "minorant" => minorant(100, 64, MINORANT_SEED, grid, policy),
        "dual-omega" => dual_omega(&lc(), grid),
        "cross-chains" => cross_chains(members, grid, policy),
        "theta" => theta(members, grid, policy),
        "fixed-point" => fixed_point(&lc(), j_max, grid, policy),
        "bridges" => bridges(members, grid, policy),
        "falsification" => falsification(members, policy),
        "system-equiv" => {
            let bases: Vec<Member> = members
                .iter()
                .filter(|m| matches!(m.kind, BatteryKind::Gevrey | BatteryKind::QGevrey))
                .cloned()
                .collect();
            system_equivalence(&bases, grid, policy)
        }
        "membership" => membership_matrix(members, grid, policy),
        _ => {
            return Err(Error::Routing(format!(
                "unknown suite `{name}`; expected one of {} or all",
                NAMES.join(", ")
            )))
        }
    })
}

fn lc_members(ms: Vec<Member>, policy: &Policy) -> Vec<Member> {
    ms.into_iter()
        .filter(|m| m.seq.is_lc(policy).is(State::Holds))
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn failures<T: Send + Sync>(
    items: Vec<T>,
    f: impl Fn(&T) -> Vec<String> + Sync + Send,
) -> Vec<String> {
    items.par_iter().map(f).collect::<Vec<_>>().concat()
}

pub fn roundtrip(ms: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let f = failures(ms.to_vec(), |m| {
        let w = AssociatedWeight::new(m.seq.clone());
        let (rec, reliable) = recover_sequence(&w, grid, policy);
        let bad: Vec<String> = (0..=reliable.min(m.seq.j_max()))
            .filter(|&j| rel_err(rec[j], m.seq.log(j)) > 1e-9)
            .map(|j| {
                format!(
                    "{}: j = {j} recovered {} vs {}",
                    m.seq.label,
                    rec[j],
                    m.seq.log(j)
                )
            })
            .collect();
        if reliable < 2 {
            vec![format!(
                "{}: reliable range {reliable} is empty",
                m.seq.label
            )]
        } else {
            bad
        }
    });
    SuiteReport::new("roundtrip", ms.len(), f)
}

/// Random non-log-convex sequences `a j log j + b j + noise`.
pub fn random_sequences(n: usize, j_max: usize, seed: u64) -> Vec<WeightSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let a = rng.gen_range(0.5..2.0);
            let b = rng.gen_range(-1.0..1.0);
            let noise = rng.gen_range(0.1..2.0);
            let mut y = vec![0.0];
            for j in 1..=j_max {
                let jf = j as f64;
                y.push(a * jf * jf.ln() + b * jf + rng.gen_range(-noise..noise));
            }
            WeightSequence::new(format!("random#{i}"), y).expect("finite with y_0 = 0")
        })
        .collect()
}

/// The all-chords envelope: `min(y_i, min over a < i < b of the chord)`.
pub fn brute_force_minorant(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let mut best = y[i];
            for a in 0..i {
                for b in i + 1..n {
                    best = best.min(crate::sequence::chord(y, a, b, i));
                }
            }
            best
        })
        .collect()
}

pub fn minorant(n: usize, j_max: usize, seed: u64, grid: &Grid, policy: &Policy) -> SuiteReport {
    let seqs = random_sequences(n, j_max, seed);
    let non_convex = seqs.iter().filter(|m| !m.log_convex()).count();
    let f = failures(seqs, |m| {
        let mut out = Vec::new();
        let lc = m.log_convex_minorant();
        let brute = brute_force_minorant(m.log_values());
        if let Some(j) = (0..=j_max).find(|&j| lc.log(j) != brute[j]) {
            out.push(format!(
                "{}: hull {} vs brute force {} at j = {j}",
                m.label,
                lc.log(j),
                brute[j]
            ));
        }
        let w = AssociatedWeight::new(m.clone());
        let (rec, reliable) = recover_sequence(&w, grid, policy);
        if let Some(j) = (0..=reliable.min(j_max)).find(|&j| rel_err(rec[j], brute[j]) > 1e-9) {
            out.push(format!(
                "{}: recovery {} vs minorant {} at j = {j}",
                m.label, rec[j], brute[j]
            ));
        }
        out
    });
    SuiteReport::new("minorant", n, f).stat("non_log_convex_inputs", non_convex as f64)
}

pub fn dual_omega(ms: &[Member], grid: &Grid) -> SuiteReport {
    let worst = ms
        .par_iter()
        .map(|m| {
            let w = AssociatedWeight::new(m.seq.clone());
            grid.log_points()
                .iter()
                .map(|&s| (w.omega_closed(s) - w.omega_sup_scan(s)).abs())
                .fold(0.0, f64::max)
        })
        .collect::<Vec<_>>();
    let f = ms
        .iter()
        .zip(&worst)
        .filter(|(_, e)| **e > 1e-12)
        .map(|(m, e)| format!("{}: max |closed - sup scan| = {e:e}", m.seq.label))
        .collect();
    SuiteReport::new("dual-omega", ms.len(), f)
        .stat("max_abs_diff", worst.iter().copied().fold(0.0, f64::max))
}

/// The (ω₆)/(mg) chain and the (ω₁) chain of one sequence.
pub fn chains(m: &WeightSequence, grid: &Grid, policy: &Policy) -> (Vec<Verdict>, Vec<Verdict>) {
    let v = Weight::from_sequence(m.clone());
    let w = AssociatedWeight::new(m.clone());
    let six = vec![
        v.check_om6_weight(grid, policy),
        check_om6_omega(&w, grid, policy),
        m.check_mg(policy),
        m.check_mg_diag(policy),
    ];
    let one = vec![
        v.check_om1_weight(grid, policy),
        check_om1_omega(&w, grid, policy),
        m.check_om1_index(policy),
    ];
    (six, one)
}

pub fn cross_chains(ms: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let f = failures(ms.to_vec(), |m| {
        let (six, one) = chains(&m.seq, grid, policy);
        let want6 = if m.has_mg { State::Holds } else { State::Fails };
        let mut out = Vec::new();
        for (chain, want) in [(&six, want6), (&one, State::Holds)] {
            for v in chain.iter().filter(|v| v.state != want) {
                out.push(format!(
                    "{}: {} is {}, expected {want}",
                    m.seq.label, v.relation, v.state
                ));
            }
        }
        out
    });
    SuiteReport::new("cross-chains", ms.len(), f)
}

pub const THETA_KINDS: [ThetaKind; 5] = [
    ThetaKind::Dila(0.5),
    ThetaKind::Dila(1.0),
    ThetaKind::Dila(2.0),
    ThetaKind::Pow(1),
    ThetaKind::Pow(2),
];

pub fn theta(ms: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let mut f = Vec::new();
    let fact =
        ThetaFunction::new(WeightSequence::gevrey(1.0, 512), ThetaKind::Dila(1.0)).expect("valid");
    for t in [1.0, 10.0, 100.0] {
        match fact.eval(t) {
            Ok(v) if rel_err(v.log_theta, t / 2.0) <= 1e-9 => {}
            Ok(v) => f.push(format!(
                "factorial theta at {t}: {} vs {}",
                v.log_theta,
                t / 2.0
            )),
            Err(e) => f.push(format!("factorial theta at {t}: {e}")),
        }
    }
    let jobs: Vec<(&Member, ThetaKind)> = ms
        .iter()
        .flat_map(|m| THETA_KINDS.map(|k| (m, k)))
        .collect();
    let results: Vec<(String, Verdict)> = jobs
        .par_iter()
        .map(|(m, k)| {
            let th = ThetaFunction::new(m.seq.clone(), *k).expect("ladder kinds are valid");
            (
                format!("{} {k:?}", m.seq.label),
                lower_bound_check(&th, grid, policy),
            )
        })
        .collect();
    let mut points = 0.0;
    for (label, v) in &results {
        points += v.witness("points").unwrap_or(0.0);
        if !v.is(State::Holds) {
            f.push(format!("{label}: lower bound {} ({})", v.state, v.note));
        }
    }
    SuiteReport::new("theta", 3 + results.len(), f).stat("certified_points", points)
}

pub fn fixed_point(ms: &[Member], j_max: usize, grid: &Grid, policy: &Policy) -> SuiteReport {
    let tol = 1e-9;
    let f = failures(ms.to_vec(), |m| {
        let v = Weight::from_sequence(m.seq.clone());
        let mut out = Vec::new();
        match v.associated_sequence(j_max, grid, policy) {
            Ok(a) => {
                if let Some(j) = (0..=a.reliable_j.min(j_max))
                    .find(|&j| rel_err(a.seq.log(j), m.seq.log(j)) > tol)
                {
                    out.push(format!(
                        "{}: M^u differs at j = {j}: {} vs {}",
                        m.seq.label,
                        a.seq.log(j),
                        m.seq.log(j)
                    ));
                }
            }
            Err(e) => out.push(format!("{}: {e}", m.seq.label)),
        }
        match v.sandwich_check(j_max, grid, policy) {
            Ok(s) => {
                let a = s.witness("A").unwrap_or(f64::NAN);
                if !s.is(State::Holds) || !(a <= 1.0 + tol) {
                    out.push(format!(
                        "{}: sandwich {} with A = {a}",
                        m.seq.label, s.state
                    ));
                }
            }
            Err(e) => out.push(format!("{}: {e}", m.seq.label)),
        }
        out
    });
    SuiteReport::new("fixed-point", ms.len(), f)
}

#[derive(Clone, Debug)]
pub struct BridgeOutcome {
    pub m: usize,
    pub n: usize,
    pub triangle: Verdict,
    pub pow: Verdict,
}

/// Both bridge characterizations on every ordered pair of distinct members.
pub fn bridge_outcomes(ms: &[Member], grid: &Grid, policy: &Policy) -> Vec<BridgeOutcome> {
    let pairs: Vec<(usize, usize)> = (0..ms.len())
        .flat_map(|i| (0..ms.len()).filter(move |k| *k != i).map(move |k| (i, k)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, k)| BridgeOutcome {
            m: i,
            n: k,
            triangle: bridge_triangle_seq(&ms[i].seq, &ms[k].seq, grid, policy),
            pow: bridge_pow_seq(&ms[i].seq, &ms[k].seq, grid, policy),
        })
        .collect()
}

pub fn bridges(ms: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let out = bridge_outcomes(ms, grid, policy);
    let total = out.len();
    let mut f = Vec::new();
    let mut un = [0usize; 2];
    for o in &out {
        for (i, v) in [&o.triangle, &o.pow].into_iter().enumerate() {
            if v.state.is_definite() {
                un[i] += 1;
            }
            if contradicts(&v.sides) {
                f.push(format!(
                    "{} vs {}: {} sides contradict ({})",
                    ms[o.m].seq.label, ms[o.n].seq.label, v.relation, v.note
                ));
            }
        }
    }
    for (i, name) in ["bridge_triangle_seq", "bridge_pow_seq"].iter().enumerate() {
        if (un[i] as f64) < 0.9 * total as f64 {
            f.push(format!(
                "{name}: unanimous on {}/{total} pairs, below 90%",
                un[i]
            ));
        }
    }
    SuiteReport::new("bridges", total, f)
        .stat("triangle_unanimous", un[0] as f64)
        .stat("pow_unanimous", un[1] as f64)
}

pub fn falsification(ms: &[Member], policy: &Policy) -> SuiteReport {
    let f = failures(ms.to_vec(), |m| {
        let mut out = Vec::new();
        let s = m.seq.check_strong_2j(policy);
        if !s.is(State::Fails) {
            out.push(format!(
                "{}: strong 2j condition is {}",
                m.seq.label, s.state
            ));
        }
        let (mg, diag) = (m.seq.check_mg(policy), m.seq.check_mg_diag(policy));
        if mg.state != diag.state {
            out.push(format!(
                "{}: mg {} but diagonal mg {}",
                m.seq.label, mg.state, diag.state
            ));
        }
        out
    });
    SuiteReport::new("falsification", ms.len(), f)
}

pub fn system_equivalence(bases: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let f = failures(bases.to_vec(), |m| {
        let label = &m.seq.label;
        let v = match system_equiv(&m.seq, grid, policy) {
            Ok(v) => v.verdict,
            Err(e) => return vec![format!("{label}: {e}")],
        };
        match m.kind {
            BatteryKind::QGevrey => {
                if !v.is(State::Fails) {
                    return vec![format!(
                        "{label}: system_equiv is {}, expected Fails",
                        v.state
                    )];
                }
                let rungs = policy.h_ladder.len();
                if v.evidence.len() != rungs
                    || v.evidence.iter().any(|(_, excess)| !(*excess > 0.0))
                {
                    return vec![format!(
                        "{label}: (om6) evidence {:?} does not cover all {rungs} ladder rungs",
                        v.evidence
                    )];
                }
                vec![]
            }
            _ if !v.is(State::Holds) => vec![format!(
                "{label}: system_equiv is {}, expected Holds",
                v.state
            )],
            _ => vec![],
        }
    });
    SuiteReport::new("system-equiv", bases.len(), f)
}

pub const MEMBERSHIP_C: [f64; 3] = [0.5, 1.0, 2.0];
pub const MONOMIALS: [usize; 4] = [0, 1, 5, 20];

pub fn membership_matrix(ms: &[Member], grid: &Grid, policy: &Policy) -> SuiteReport {
    let systems = ["ind-dila", "proj-dila", "ind-pow", "proj-pow"];
    let jobs: Vec<(&Member, f64)> = ms
        .iter()
        .flat_map(|m| MEMBERSHIP_C.map(|c| (m, c)))
        .collect();
    let f = failures(jobs, |(m, c)| {
        let src = Source::Sequence(m.seq.clone());
        let mut out = Vec::new();
        let mut expect = |f: &PowerSeries, space: SpaceSpec, want: State| {
            let v = membership(f, &space, grid, policy);
            if v.state != want {
                out.push(format!(
                    "{} in {space}: {}, expected {want} ({})",
                    f.label, v.state, v.note
                ));
            }
        };
        let flavors = ["single", "single0"]
            .iter()
            .map(|s| (s.parse::<Flavor>().unwrap(), Some(*c)))
            .chain(
                systems
                    .iter()
                    .flat_map(|s| [s.to_string(), format!("{s}0")])
                    .map(|s| (s.parse().unwrap(), None)),
            );
        for (fl, param) in flavors {
            let space = SpaceSpec::new(src.clone(), fl, param).expect("valid flavor");
            for k in MONOMIALS {
                expect(&PowerSeries::monomial(k), space.clone(), State::Holds);
            }
        }
        let th = ThetaFunction::new(m.seq.clone(), ThetaKind::Dila(*c)).expect("positive c");
        let series = PowerSeries::from_theta(&th);
        for (fl, want) in [("ind-dila", State::Holds), ("proj-dila", State::Fails)] {
            expect(
                &series,
                SpaceSpec::new(src.clone(), fl.parse().unwrap(), None).unwrap(),
                want,
            );
        }
        out
    });
    SuiteReport::new("membership", ms.len() * MEMBERSHIP_C.len(), f)
}
