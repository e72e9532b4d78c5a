//! End-to-end runs of the compiled binary: presets, flag precedence,
//! output formats, determinism, and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zctiming"))
        .args(args)
        .output()
        .expect("spawn zctiming")
}

fn stem(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn read(stem: &str, ext: &str) -> String {
    fs::read_to_string(format!("{stem}.{ext}")).unwrap()
}

fn json(stem: &str) -> serde_json::Value {
    serde_json::from_str(&read(stem, "json")).unwrap()
}

const CATALOG_140: [i64; 15] = [
    140, 280, -419, -279, -139, 1, 141, 281, -418, -278, -138, 2, 142, 282, -417,
];

#[test]
fn repro_table_rows_match_the_catalog() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "t1");
    let r = run(&["--repro", "table1", "--mu", "140", "--format", "csv", "--out", &out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let csv = read(&out, "csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "mu,delta_kappa,delta_lambda_dagger");
    assert_eq!(lines.len(), 16);
    for (i, &offset) in CATALOG_140.iter().enumerate() {
        assert_eq!(lines[i + 1], format!("140,{},{offset}", i + 1));
    }

    // without the root override both reference roots are emitted
    let full = stem(&dir, "t1full");
    let r = run(&["--repro", "table1", "--format", "csv", "--out", &full]);
    assert!(r.status.success());
    assert_eq!(read(&full, "csv").lines().count(), 31);
}

#[test]
fn spectrum_summary_reports_floors_and_minimum() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "spectrum367");
    let r = run(&["spectrum", "-N", "839", "--mu", "367", "-W", "20", "--out", &out]);
    assert!(r.status.success());
    let v = json(&out);
    assert_eq!(v["min_critical_offset"], 1);
    assert_eq!(v["floor_above_half"], 0.2);
    assert_eq!(v["floor_at_half"], 0.1);

    let narrow = stem(&dir, "spectrum16");
    let r = run(&["spectrum", "-N", "839", "--mu", "367", "-W", "16", "--out", &narrow]);
    assert!(r.status.success());
    let v = json(&narrow);
    assert_eq!(v["min_critical_offset"], 52);
    assert_eq!(v["floor_above_half"], 0.0);

    let csv = read(&out, "csv");
    assert_eq!(csv.lines().next().unwrap(), "delta_lambda_dagger,magnitude");
    assert_eq!(csv.lines().count(), 39); // header + 2(W-1) keys
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            "-N".into(),
            "139".into(),
            "--mu".into(),
            "34".into(),
            "-W".into(),
            "8".into(),
            "--delta-lambda".into(),
            "0.3".into(),
            "--snr-db".into(),
            "-3".into(),
            "--trials".into(),
            "400".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let (a, b) = (stem(&dir, "a"), stem(&dir, "b"));
    for out in [&a, &b] {
        let argv: Vec<String> = args(out);
        let argv: Vec<&str> = argv.iter().map(|s| s.as_str()).collect();
        let r = run(&argv);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read(&a, "csv"), read(&b, "csv"));
    assert_eq!(read(&a, "json"), read(&b, "json"));

    let v = json(&a);
    assert_eq!(v["config"]["N_CP"], 7); // default W - 1
    assert_eq!(v["config"]["kappa_mode"], "uniform");
    let total: u64 = read(&a, "csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 400);
}

#[test]
fn analyze_and_simulate_share_the_config_schema() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("scenario.json");
    fs::write(
        &cfg,
        r#"{"N": 139, "mu": 34, "W": 8, "delta_lambda": 0.5, "eta_db": -3.0,
           "N_CP": 7, "trials": 300, "seed": 3, "kappa_mode": {"fixed": 2}}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let a = stem(&dir, "an");
    let r = run(&["analyze", "--config", cfg, "--out", &a]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&a);
    assert_eq!(v["scenario"]["mu"], 34);
    assert_eq!(v["scenario"]["delta_lambda"], 0.5);

    let s = stem(&dir, "si");
    let r = run(&["simulate", "--config", cfg, "--out", &s]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&s);
    assert_eq!(v["config"]["trials"], 300);
    assert_eq!(v["config"]["kappa_mode"]["fixed"], 2);

    // flags outrank the file
    let o = stem(&dir, "over");
    let r = run(&["analyze", "--config", cfg, "--mu", "21", "--out", &o]);
    assert!(r.status.success());
    assert_eq!(json(&o)["scenario"]["mu"], 21);
}

#[test]
fn format_flag_gates_the_output_files() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "only");
    let r = run(&[
        "spectrum", "-N", "139", "--mu", "34", "-W", "8", "--format", "csv", "--out", &out,
    ]);
    assert!(r.status.success());
    assert!(Path::new(&format!("{out}.csv")).exists());
    assert!(!Path::new(&format!("{out}.json")).exists());
    assert!(!PathBuf::from(format!("{out}.csv.tmp")).exists());
}

#[test]
fn generate_starts_at_unity_and_validates() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "zc");
    let r = run(&["generate", "--zc", "-N", "839", "--mu", "140", "--format", "csv", "--out", &out]);
    assert!(r.status.success());
    let csv = read(&out, "csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,re,im");
    assert_eq!(
        lines.next().unwrap(),
        "0,1.0000000000000000e0,0.0000000000000000e0"
    );
    assert_eq!(csv.lines().count(), 840);

    let r = run(&["generate", "--zc", "-N", "838", "--mu", "3"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("odd"));
}

#[test]
fn pn_generation_is_binary() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "pn");
    let r = run(&["generate", "--pn", "-N", "839", "--format", "csv", "--out", &out]);
    assert!(r.status.success());
    let csv = read(&out, "csv");
    assert_eq!(csv.lines().count(), 840);
    for line in csv.lines().skip(1) {
        let re = line.split(',').nth(1).unwrap();
        assert!(re.starts_with("1.") || re.starts_with("-1."), "{line}");
    }
}

#[test]
fn select_ranks_the_reference_roots() {
    let dir = TempDir::new().unwrap();
    let out = stem(&dir, "sel");
    let r = run(&[
        "select",
        "-N",
        "839",
        "-W",
        "16",
        "--candidates",
        "140,367,29,1",
        "--freq-bound",
        "1.5",
        "--out",
        &out,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = read(&out, "csv");
    let order: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(order, ["367", "29", "140", "1"]);
    let v = json(&out);
    assert_eq!(v["ranked"][0]["mu"], 367);
    assert_eq!(v["ranked"][0]["min_critical_offset"], 52);
}

#[test]
fn usage_errors_exit_with_2() {
    // unknown preset
    let r = run(&["--repro", "table9"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown preset"));

    // preset and subcommand together
    let r = run(&["--repro", "fig4", "spectrum"]);
    assert_eq!(r.status.code(), Some(2));

    // missing required parameter
    let r = run(&["spectrum", "-N", "839", "--mu", "140"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing parameter W"));

    // config file with an unknown key
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"N": 11, "oops": 1}"#).unwrap();
    let r = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    // no subcommand at all
    let r = run(&[]);
    assert_eq!(r.status.code(), Some(2));
}
