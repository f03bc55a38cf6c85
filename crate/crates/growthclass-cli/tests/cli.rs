use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn state_of(doc: &serde_json::Value, relation: &str) -> String {
    doc["result"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["relation"] == relation)
        .unwrap_or_else(|| panic!("no {relation} in {doc}"))["state"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn seq_analyze_reports_mg_for_factorials() {
    let out = run(&["seq", "analyze", "gevrey:1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(state_of(&doc, "mg"), "Holds");
    assert_eq!(state_of(&doc, "strong_2j"), "Fails");
    assert_eq!(doc["config"]["J"], 512);
}

#[test]
fn q_gevrey_lacks_mg() {
    let doc = json(&run(&["--J", "128", "seq", "analyze", "q_gevrey:2"]));
    assert_eq!(state_of(&doc, "mg"), "Fails");
    assert_eq!(state_of(&doc, "om1_index"), "Holds");
    assert_eq!(doc["config"]["J"], 128);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["seq", "analyze", "nope:3"],
        vec!["--J", "4", "seq", "analyze", "gevrey:1"],
        vec![
            "--grid-min",
            "10",
            "--grid-max",
            "1",
            "seq",
            "analyze",
            "gevrey:1",
        ],
        vec!["verify", "no-such-suite"],
        vec![
            "spaces",
            "decide",
            "--left",
            "single:gevrey:1",
            "--right",
            "ind-dila:gevrey:1",
        ],
        vec!["theta", "eval", "--seq", "gevrey:1", "--t", "1e9"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn structured_output_is_byte_identical() {
    let args = ["--J", "64", "seq", "compare", "gevrey:1", "gevrey:2"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"margin\": 5.0000000000000003e-2"), "{text}");
}

#[test]
fn theta_csv_rows() {
    let out = run(&[
        "--format", "csv", "theta", "eval", "--seq", "gevrey:1", "--t", "1,10,100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "t,log_theta,err_bar");
    for (row, t) in body[1..].iter().zip([1.0, 10.0, 100.0]) {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0], t);
        assert!((f[1] - t / 2.0).abs() <= 1e-9 * t, "{row}");
    }
}

#[test]
fn expectations_drive_the_exit_code() {
    let base = [
        "spaces",
        "decide",
        "--left",
        "ind-dila:gevrey:2",
        "--right",
        "proj-dila:gevrey:1",
    ];
    let ok = run(&[&base[..], &["--expect", "holds"]].concat());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        json(&ok)["result"]["theorem_tag"],
        "dila-sequence/strong-triangle"
    );
    let bad = run(&[&base[..], &["--expect", "fails"]].concat());
    assert_eq!(bad.status.code(), Some(1));
    let eq = run(&[
        "spaces",
        "system-equiv",
        "--seq",
        "q_gevrey:2",
        "--expect",
        "fails",
    ]);
    assert_eq!(eq.status.code(), Some(0));
}

#[test]
fn verify_runs_a_suite() {
    let out = run(&["--format", "csv", "verify", "falsification"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .any(|l| l.starts_with("falsification,true,36,0")),
        "{text}"
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("gc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("run.toml");
    std::fs::write(&p, "J = 48\nbattery = \"bases\"\nformat = \"json\"\n").unwrap();
    let doc = json(&run(&[
        "--config",
        p.to_str().unwrap(),
        "--margin",
        "0.07",
        "verify",
        "system-equiv",
    ]));
    assert_eq!(doc["config"]["J"], 48);
    assert_eq!(doc["config"]["margin"].as_f64(), Some(0.07));
    assert_eq!(doc["result"][0]["checked"], 6);
    std::fs::write(&p, "J = \"many\"\n").unwrap();
    assert_eq!(
        run(&[
            "--config",
            p.to_str().unwrap(),
            "seq",
            "analyze",
            "gevrey:1"
        ])
        .status
        .code(),
        Some(2)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn weight_table_is_plot_ready() {
    let dir = std::env::temp_dir().join(format!("gc-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&[
        "--format", "csv", "--grid-n", "50", "weight", "table", "exp:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let p = dir.join("w.csv");
    std::fs::write(&p, &body).unwrap();
    // the table reads back as a tabulated weight
    let spec = format!("table:{}", p.display());
    let back = run(&["weight", "analyze", &spec]);
    assert_eq!(
        back.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&back.stderr)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
