use std::path::Path;
use std::process::{Command, Output};

use reachlab::config::{ExperimentConfig, ShapeSpec};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_reachlab"));
    c.env_remove("REACHLAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn reachlab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const SQUARE: &str = r#"{"type":"box","lo":[0,0],"hi":[1,1]}"#;
const CUBE: &str = r#"{"type":"box","lo":[0,0,0],"hi":[1,1,1]}"#;

#[test]
fn heat_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let p = dir.path().join(format!("h{threads}.csv"));
        let o = run(&[
            "--threads", threads, "heat", "--shape", SQUARE, "--method", "mc", "--samples", "200000", "--seed", "17",
            "--tgrid", "dyadic:0.1:4", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(outs[0], outs[1]);

    // the environment fallback takes the same path
    let p = dir.path().join("env.csv");
    let o = bin()
        .env("REACHLAB_THREADS", "3")
        .args([
            "heat", "--shape", SQUARE, "--method", "mc", "--samples", "200000", "--seed", "17", "--tgrid",
            "dyadic:0.1:4", "--out", p.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&p).unwrap(), outs[0]);
}

#[test]
fn validate_l_shape_records_zero_reach() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("meta.json");
    let o = run(&["validate", "--shape", r#"{"type":"l_shape"}"#, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["shape"]["reach"], 0.0);
    assert_eq!(v["shape"]["zero_reach"], true);
    assert_eq!(v["shape"]["volume"], 3.0);
    assert_eq!(v["provenance"]["command"], "validate");
}

#[test]
fn validate_reports_infinite_reach_for_convex_sets() {
    let o = run(&["validate", "--shape", r#"{"type":"ball","center":[0,0,0],"radius":2}"#]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reach"], "inf");
}

#[test]
fn steiner_cube_fit_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("steiner.csv");
    let o = run(&["steiner", "--shape", CUBE, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let fit = data_rows(&dir.path().join("steiner.fit.csv"));
    assert_eq!(fit.len(), 1);
    assert_eq!(fit[0][0], "exact");
    let c: Vec<f64> = fit[0][1..4].iter().map(|s| s.parse().unwrap()).collect();
    for (got, want) in c.iter().zip([1.0, 3.0, 3.0]) {
        assert!((got - want).abs() < 1e-9, "{c:?}");
    }
    // exact column against abc + 2r(ab+bc+ca) + πr²(a+b+c) + 4πr³/3 − abc
    for row in data_rows(&p) {
        let r: f64 = row[0].parse().unwrap();
        let v: f64 = row[1].parse().unwrap();
        let want = 6.0 * r + 3.0 * std::f64::consts::PI * r * r + 4.0 / 3.0 * std::f64::consts::PI * r.powi(3);
        assert!((v - want).abs() < 1e-12 * want);
    }
}

#[test]
fn unsorted_t_grid_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let o = run(&["expand", "--shape", SQUARE, "--tgrid", "0.1,0.025,0.05", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn mc_without_seed_exits_2() {
    let o = run(&["heat", "--shape", SQUARE, "--method", "mc", "--tgrid", "0.1"]);
    assert_eq!(code(&o), 2);
    let o = run(&["blowup", "--shape", SQUARE, "--point", "0,0", "--rhogrid", "1,0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing").join("h.csv");
    let o = run(&["heat", "--shape", SQUARE, "--tgrid", "0.1", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"command":"explode","shape":{"type":"l_shape"}}"#).unwrap();
    assert_eq!(code(&run(&["run", "--config", p.to_str().unwrap()])), 2);
    std::fs::write(&p, r#"{"command":"validate","shape":{"type":"ball","center":[0,0],"radius":-1}}"#).unwrap();
    assert_eq!(code(&run(&["run", "--config", p.to_str().unwrap()])), 2);
    std::fs::write(&p, r#"{"command":"validate","shape":{"type":"box","lo":[0,0],"hi":[1,1]},"r_grid":[0.2,0.1]}"#).unwrap();
    assert_eq!(code(&run(&["run", "--config", p.to_str().unwrap()])), 2);
}

#[test]
fn run_config_matches_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = run(&[
        "heat", "--shape", SQUARE, "--phi", "linear:1,0;2", "--tgrid", "dyadic:0.1:3", "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let cfg = serde_json::json!({
        "command": "heat",
        "shape": {"type": "box", "lo": [0, 0], "hi": [1, 1]},
        "phi": "linear:1,0;2",
        "t_grid": "dyadic:0.1:3",
        "outputs": {"csv": b},
        "threads": 2
    });
    let p = dir.path().join("c.json");
    std::fs::write(&p, cfg.to_string()).unwrap();
    assert_eq!(code(&run(&["run", "--config", p.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn report_aggregates_heat_tables() {
    let dir = tempfile::tempdir().unwrap();
    let lo = dir.path().join("lo.csv");
    let hi = dir.path().join("hi.csv");
    for (p, g) in [(&lo, "dyadic:0.0125:4"), (&hi, "0.025,0.05,0.1")] {
        assert_eq!(code(&run(&["heat", "--shape", SQUARE, "--tgrid", g, "--out", p.to_str().unwrap()])), 0);
    }
    let rep = dir.path().join("rep.json");
    let o = run(&[
        "report", "--shape", SQUARE, "--inputs", lo.to_str().unwrap(), hi.to_str().unwrap(), "--out",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    let r = &v["report"];
    assert_eq!(r["samples"].as_array().unwrap().len(), 7);
    let a2 = r["fitted"]["a2"].as_f64().unwrap();
    assert!((a2 + 4.0 / std::f64::consts::PI).abs() < 1e-4, "{a2}");
    assert!(dir.path().join("rep.csv").exists());

    // overlapping grids collide
    let o = run(&[
        "report", "--shape", SQUARE, "--inputs", lo.to_str().unwrap(), lo.to_str().unwrap(), "--out",
        dir.path().join("dup.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn csv_headers_carry_hash_and_units() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.csv");
    let o = run(&[
        "blowup", "--shape", SQUARE, "--point", "0,0", "--rhogrid", "1,0.5", "--seed", "2", "--samples", "1000",
        "--out", p.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# reachlab blowup config_hash="));
    assert!(lines.next().unwrap().starts_with("# units: rho=length"));
    for row in data_rows(&p) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn every_shape_variant_parses() {
    let specs = [
        r#"{"type":"ball","center":[0,0],"radius":1}"#,
        r#"{"type":"polytope_v","vertices":[[0,0],[1,0],[0,1]]}"#,
        r#"{"type":"polytope_h","halfspaces":[{"normal":[-1,0],"offset":0},{"normal":[0,-1],"offset":0},{"normal":[1,1],"offset":1}]}"#,
        r#"{"type":"box","lo":[0,0,0],"hi":[1,2,3]}"#,
        r#"{"type":"rounded","core":{"type":"box","lo":[0,0],"hi":[1,1]},"radius":0.2}"#,
        r#"{"type":"union","parts":[{"type":"ball","center":[0,0],"radius":1},{"type":"ball","center":[3,0],"radius":1}]}"#,
        r#"{"type":"polygon","vertices":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#,
        r#"{"type":"staircase","steps":4}"#,
        r#"{"type":"l_shape"}"#,
    ];
    for s in specs {
        let spec: ShapeSpec = serde_json::from_str(s).unwrap();
        spec.build().unwrap_or_else(|e| panic!("{s}: {e}"));
        let back: ShapeSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
    let bad: Result<ShapeSpec, _> = serde_json::from_str(r#"{"type":"torus"}"#);
    assert!(bad.is_err());
}

#[test]
fn hash_ignores_threads_and_paths() {
    let base = r#"{"command":"heat","shape":{"type":"l_shape"},"seed":1}"#;
    let a = ExperimentConfig::from_json(base).unwrap();
    let b = ExperimentConfig::from_json(
        r#"{"command":"heat","shape":{"type":"l_shape"},"seed":1,"threads":8,"outputs":{"csv":"x.csv"}}"#,
    )
    .unwrap();
    let c = ExperimentConfig::from_json(r#"{"command":"heat","shape":{"type":"l_shape"},"seed":2}"#).unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
}
