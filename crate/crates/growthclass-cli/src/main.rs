mod config;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use growthclass::associated::{legendre_recover, AssociatedWeight};
use growthclass::family::{self, Source};
use growthclass::relations::{bridge_pow_seq, bridge_triangle_seq, mg_transfer_check};
use growthclass::report::{fmt_f64, to_json, write_verdicts_csv};
use growthclass::spaces::{
    decide_inclusion, system_equiv, system_equiv_weight, InclusionVerdict, SpaceSpec,
};
use growthclass::suites::{self, SuiteReport};
use growthclass::theta::{ThetaFunction, ThetaKind};
use growthclass::{State, Verdict, WeightSequence};
use serde::Serialize;

use config::{Format, Overrides, RunConfig};

/// Weight sequences, associated weight functions and growth-class
/// inclusions of weighted spaces of entire functions.
#[derive(Parser)]
#[command(name = "growthclass", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence conditions and comparisons.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Weight-function conditions and plot-ready tables.
    #[command(subcommand)]
    Weight(WeightCmd),
    /// Inclusions between weighted spaces.
    #[command(subcommand)]
    Spaces(SpacesCmd),
    /// The comparison functions theta.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Run a named check suite on the configured battery (or `all`).
    Verify { suite: String },
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Log-convexity, LC, (mg), (om1) index, strong 2j and the 2j alternative.
    Analyze { seq: String },
    /// Order relations in both directions and the bridge characterizations.
    Compare { a: String, b: String },
}

#[derive(Subcommand)]
enum WeightCmd {
    /// Normalization, (om3), convexity, (om1), (om6), associated sequence.
    Analyze { weight: String },
    /// `t,omega` rows on the grid.
    Table { weight: String },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Expect {
    Holds,
    Fails,
    Inconclusive,
}

impl Expect {
    fn state(self) -> State {
        match self {
            Expect::Holds => State::Holds,
            Expect::Fails => State::Fails,
            Expect::Inconclusive => State::Inconclusive,
        }
    }
}

#[derive(Subcommand)]
enum SpacesCmd {
    /// Decide `left ⊆ right` for specs `flavor:source[:param]`.
    Decide {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Exit 1 unless the verdict has this state.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Whether the dilatation and power systems of a source coincide.
    SystemEquiv {
        #[arg(long)]
        seq: String,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Dila,
    Pow,
}

#[derive(Subcommand)]
enum ThetaCmd {
    /// `t,log_theta,err_bar` rows.
    Eval {
        #[arg(long)]
        seq: String,
        #[arg(long, value_enum, default_value = "dila")]
        kind: KindArg,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
}

/// Exit status once the report is written.
enum Status {
    Ok,
    Unexpected(String),
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    command: String,
    result: T,
}

struct Out<'a> {
    cfg: &'a RunConfig,
    command: String,
}

impl Out<'_> {
    fn json<T: Serialize>(&self, result: T) -> Result<()> {
        let r = Report {
            config: self.cfg,
            command: self.command.clone(),
            result,
        };
        let mut o = io::stdout().lock();
        writeln!(o, "{}", to_json(&r))?;
        Ok(())
    }

    /// The config as `#` comment lines ahead of the CSV body.
    fn csv_header(&self, o: &mut impl Write) -> Result<()> {
        writeln!(o, "# command = {:?}", self.command)?;
        for line in toml::to_string(self.cfg)?.lines() {
            writeln!(o, "# {line}")?;
        }
        Ok(())
    }

    fn verdicts(&self, vs: Vec<Verdict>) -> Result<()> {
        match self.cfg.format {
            Format::Json => self.json(vs),
            Format::Csv => {
                let mut o = io::stdout().lock();
                self.csv_header(&mut o)?;
                write_verdicts_csv(&vs, &mut o)?;
                Ok(())
            }
        }
    }

    fn inclusion(&self, v: &InclusionVerdict) -> Result<()> {
        match self.cfg.format {
            Format::Json => self.json(v),
            Format::Csv => {
                let mut o = io::stdout().lock();
                self.csv_header(&mut o)?;
                writeln!(o, "# theorem_tag = {:?}", v.theorem_tag)?;
                let mut all = vec![v.verdict.clone()];
                all.extend(v.preconditions.iter().cloned());
                write_verdicts_csv(&all, &mut o)?;
                Ok(())
            }
        }
    }
}

fn seq_analyze(out: &Out, text: &str) -> Result<Status> {
    let m = family::parse_sequence(text, out.cfg.j)?;
    let p = out.cfg.policy();
    let vs = vec![
        m.is_log_convex(),
        m.is_lc(&p),
        m.check_mg(&p),
        m.check_mg_diag(&p),
        m.check_om1_index(&p),
        m.check_strong_2j(&p),
        m.check_56_alternative(&p),
        roundtrip(&m, out.cfg),
    ];
    out.verdicts(vs)?;
    Ok(Status::Ok)
}

/// Worst relative error of Legendre recovery over the reliable range,
/// with or without the knots added to the grid.
fn roundtrip(m: &WeightSequence, cfg: &RunConfig) -> Verdict {
    let (g, p) = (cfg.grid(), cfg.policy());
    let lc = m.log_convex_minorant();
    let w = AssociatedWeight::new(m.clone());
    let rg = if cfg.knot_augmented {
        w.recovery_grid(&g)
    } else {
        g.clone()
    };
    let reliable = w.reliable_range(&g, &p).min(m.j_max());
    let worst = (0..=reliable)
        .map(|j| {
            let r = legendre_recover(&w, j, &rg).log_value;
            (r - lc.log(j)).abs() / lc.log(j).abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let state = if worst <= 1e-9 {
        State::Holds
    } else {
        State::Fails
    };
    Verdict::new("legendre_roundtrip", state)
        .with_witness("reliable_j", reliable as f64)
        .with_witness("max_rel_err", worst)
        .with_note("recovery of the log-convex minorant on the reliable range")
}

fn seq_compare(out: &Out, a: &str, b: &str) -> Result<Status> {
    let j = out.cfg.j;
    let (m, n) = (family::parse_sequence(a, j)?, family::parse_sequence(b, j)?);
    let (g, p) = (out.cfg.grid(), out.cfg.policy());
    let mut vs = Vec::new();
    for (x, y) in [(&m, &n), (&n, &m)] {
        let tag = |v: Verdict| {
            let label = format!("{}({}, {})", v.relation, x.label, y.label);
            let mut v = v;
            v.relation = label;
            v
        };
        vs.push(tag(x.seq_preceq(y, &p)));
        vs.push(tag(x.seq_triangle(y, &p)));
        vs.push(tag(bridge_triangle_seq(x, y, &g, &p)));
        vs.push(tag(bridge_pow_seq(x, y, &g, &p)));
        vs.push(tag(mg_transfer_check(x, y, &g, &p)));
    }
    let mut approx = m.seq_approx(&n, &p);
    approx.relation = format!("seq_approx({}, {})", m.label, n.label);
    vs.insert(0, approx);
    out.verdicts(vs)?;
    Ok(Status::Ok)
}

fn weight_analyze(out: &Out, text: &str) -> Result<Status> {
    let w = family::parse_weight(text, out.cfg.j)?;
    let (g, p) = (out.cfg.grid(), out.cfg.policy());
    let pts = w.eval_points(&g);
    let norm = if w.is_normalized_on(&pts) {
        Verdict::holds("normalized").with_witness("points", pts.len() as f64)
    } else {
        Verdict::fails("normalized").with_note("omega is not 0 on [0, 1] or negative somewhere")
    };
    let mut vs = vec![
        norm,
        w.rapidly_decreasing(&g, &p),
        w.is_convex_weight(&g, &p),
        w.check_om1_weight(&g, &p),
        w.check_om6_weight(&g, &p),
    ];
    match w.associated_sequence(out.cfg.j, &g, &p) {
        Ok(a) => {
            let mut v = a.seq.is_lc(&p);
            v.relation = "associated_sequence_LC".into();
            vs.push(
                v.with_witness("reliable_j", a.reliable_j as f64)
                    .with_witness("projection", a.projection),
            );
        }
        Err(e) => vs.push(Verdict::inconclusive("associated_sequence", e.to_string())),
    }
    match w.sandwich_check(out.cfg.j, &g, &p) {
        Ok(v) => vs.push(v),
        Err(e) => vs.push(Verdict::inconclusive("sandwich", e.to_string())),
    }
    out.verdicts(vs)?;
    Ok(Status::Ok)
}

fn weight_table(out: &Out, text: &str) -> Result<Status> {
    let w = family::parse_weight(text, out.cfg.j)?;
    let g = out.cfg.grid();
    let pts = if out.cfg.knot_augmented {
        w.eval_points(&g)
    } else {
        g.log_points().to_vec()
    };
    match out.cfg.format {
        Format::Csv => {
            let mut o = io::stdout().lock();
            out.csv_header(&mut o)?;
            growthclass::io::write_omega_table(&w, &pts, &mut o)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                t: f64,
                omega: f64,
            }
            let rows: Vec<Row> = pts
                .iter()
                .filter_map(|&s| {
                    w.omega(s.exp()).ok().map(|om| Row {
                        t: s.exp(),
                        omega: om,
                    })
                })
                .collect();
            out.json(rows)?;
        }
    }
    Ok(Status::Ok)
}

fn check_expect(v: State, expect: Option<Expect>) -> Status {
    match expect {
        Some(e) if e.state() != v => {
            Status::Unexpected(format!("verdict {v}, expected {}", e.state()))
        }
        _ => Status::Ok,
    }
}

fn spaces(out: &Out, cmd: &SpacesCmd) -> Result<Status> {
    let (g, p) = (out.cfg.grid(), out.cfg.policy());
    let (v, expect) = match cmd {
        SpacesCmd::Decide {
            left,
            right,
            expect,
        } => {
            let a = SpaceSpec::parse(left, out.cfg.j)?;
            let b = SpaceSpec::parse(right, out.cfg.j)?;
            (decide_inclusion(&a, &b, &g, &p)?, *expect)
        }
        SpacesCmd::SystemEquiv { seq, expect } => {
            let v = match family::parse_source(seq, out.cfg.j)? {
                Source::Sequence(m) => system_equiv(&m, &g, &p)?,
                Source::Weight(w) => system_equiv_weight(&w, out.cfg.j, &g, &p)?,
            };
            (v, *expect)
        }
    };
    out.inclusion(&v)?;
    Ok(check_expect(v.state(), expect))
}

fn theta(out: &Out, cmd: &ThetaCmd) -> Result<Status> {
    let ThetaCmd::Eval { seq, kind, c, t } = cmd;
    let m = family::parse_sequence(seq, out.cfg.j)?;
    let kind = match kind {
        KindArg::Dila => ThetaKind::Dila(*c),
        KindArg::Pow => {
            if c.fract() != 0.0 || *c < 1.0 {
                bail!("--kind pow needs a positive integer --c, got {c}");
            }
            ThetaKind::Pow(*c as u32)
        }
    };
    let th = ThetaFunction::new(m, kind)?;
    let vals = t
        .iter()
        .map(|&x| th.eval(x).map(|v| (x, v)))
        .collect::<growthclass::Result<Vec<_>>>()?;
    match out.cfg.format {
        Format::Csv => {
            let mut o = io::stdout().lock();
            out.csv_header(&mut o)?;
            writeln!(o, "t,log_theta,err_bar")?;
            for (x, v) in vals {
                writeln!(
                    o,
                    "{},{},{}",
                    fmt_f64(x),
                    fmt_f64(v.log_theta),
                    fmt_f64(v.err_bar)
                )?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                t: f64,
                log_theta: f64,
                err_bar: f64,
            }
            out.json(
                vals.into_iter()
                    .map(|(t, v)| Row {
                        t,
                        log_theta: v.log_theta,
                        err_bar: v.err_bar,
                    })
                    .collect::<Vec<_>>(),
            )?;
        }
    }
    Ok(Status::Ok)
}

fn verify(out: &Out, suite: &str) -> Result<Status> {
    let cfg = out.cfg;
    let reports = suites::run(suite, &cfg.battery(), cfg.j, &cfg.grid(), &cfg.policy())?;
    match cfg.format {
        Format::Json => out.json(&reports)?,
        Format::Csv => {
            let mut o = io::stdout().lock();
            out.csv_header(&mut o)?;
            let mut wr = csv::Writer::from_writer(&mut o);
            wr.write_record(["suite", "passed", "checked", "failures", "stats"])?;
            for r in &reports {
                let stats = r
                    .stats
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
                    .collect::<Vec<_>>()
                    .join(";");
                wr.write_record([
                    r.name.clone(),
                    r.passed.to_string(),
                    r.checked.to_string(),
                    r.failures.len().to_string(),
                    stats,
                ])?;
            }
            wr.flush()?;
        }
    }
    let failed: Vec<&SuiteReport> = reports.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        for f in &r.failures {
            eprintln!("{}: {f}", r.name);
        }
    }
    Ok(if failed.is_empty() {
        Status::Ok
    } else {
        Status::Unexpected(format!("{} suite(s) failed", failed.len()))
    })
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Status> {
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let out = Out { cfg, command };
    match &cli.command {
        Command::Seq(SeqCmd::Analyze { seq }) => seq_analyze(&out, seq),
        Command::Seq(SeqCmd::Compare { a, b }) => seq_compare(&out, a, b),
        Command::Weight(WeightCmd::Analyze { weight }) => weight_analyze(&out, weight),
        Command::Weight(WeightCmd::Table { weight }) => weight_table(&out, weight),
        Command::Spaces(cmd) => spaces(&out, cmd),
        Command::Theta(cmd) => theta(&out, cmd),
        Command::Verify { suite } => verify(&out, suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match RunConfig::resolve(&cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Unexpected(msg)) => {
            eprintln!("unexpected: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
