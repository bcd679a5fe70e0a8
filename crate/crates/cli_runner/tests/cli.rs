use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_burgers-levels"));
    c.env_remove("BURGERS_LEVELS_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMOKE: &str = r#"{"alpha": 0.6, "K": 32, "dt": 0.001, "T": 0.1, "seed": 9, "direct": true}"#;

#[test]
fn plan_writes_json_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let o = run(&["plan", "--alpha", "0.8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["n"], 2);
    assert_eq!(plan["alphas"].as_array().unwrap().len(), 3);
    assert!(fs::read_to_string(out.join("plan.txt"))
        .unwrap()
        .contains("n = 2"));
}

#[test]
fn subcritical_alpha_is_the_direct_regime() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "plan",
        "--alpha",
        "0.45",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(
        text.contains("n = 0") && text.contains("direct regime"),
        "{text}"
    );
}

#[test]
fn alpha_one_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "plan",
        "--alpha",
        "1.0",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported regime"));
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn smoke_simulation_is_fast_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.json", SMOKE);
    let series = |name: &str, workers: &str| {
        let out = tmp.path().join(name);
        let start = Instant::now();
        let o = run(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(start.elapsed().as_secs_f64() < 10.0);
        fs::read(out.join("series.csv")).unwrap()
    };
    let a = series("a", "1");
    assert_eq!(a, series("b", "2"));
    let out = tmp.path().join("a");
    for f in ["run.json", "summary.json", "plan.json", "config.json"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let text = String::from_utf8(a).unwrap();
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("time,path,l2,sup,dead"));
    assert!(text.contains(",u,") && text.contains(",sum,"));
}

#[test]
fn seed_flag_overrides_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.json", SMOKE);
    let series = |seed: &str| {
        let out = tmp.path().join(format!("s{seed}"));
        assert_eq!(
            code(&run(&[
                "simulate",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--seed",
                seed
            ])),
            0
        );
        let stored: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
        assert_eq!(stored["seed"].as_u64().unwrap().to_string(), seed);
        fs::read(out.join("series.csv")).unwrap()
    };
    assert_ne!(series("1"), series("2"));
}

#[test]
fn zero_noise_from_zero_data_stays_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{"alpha": 0.6, "K": 16, "dt": 0.001, "T": 0.05, "noise_amplitude": 0.0, "direct": true}"#,
    );
    let out = tmp.path().join("z");
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let rows = csv_rows(&out.join("series.csv"));
    assert!(rows.len() > 10);
    for row in rows {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0, "{row:?}");
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0, "{row:?}");
    }
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn several_samples_get_their_own_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{"alpha": 0.6, "K": 16, "dt": 0.001, "T": 0.02, "samples": 3, "system": "frak", "split_remainder": true}"#,
    );
    let out = tmp.path().join("m");
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    for s in 0..3 {
        assert!(out.join(format!("sample_{s:04}/series.csv")).is_file());
    }
    let o = run(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(
        text.contains("3 sample(s)") && text.contains("eta") && text.contains("rho"),
        "{text}"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"alpha": 0.6, "K": 16, "dt": 0.001, "T": 0.1, "colour": 1}"#,
    );
    let o = run(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&[
        "plan",
        "--alpha",
        "0.6",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn planner_suite_verifies_and_reproduces() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let start = Instant::now();
    let o = run(&[
        "verify",
        "--suite",
        "planner",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(
        start.elapsed().as_secs_f64() < 1.0 + 0.5,
        "process start plus a sub-second suite"
    );
    for f in ["verify.json", "report.json", "report.txt", "fits.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let o = run(&[
        "report",
        "--reproduce",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("reproduction: identical"));

    // The stored config alone reproduces the report.
    let again = tmp.path().join("w");
    let cfg = out.join("verify.json");
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            again.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        fs::read(out.join("report.json")).unwrap(),
        fs::read(again.join("report.json")).unwrap()
    );
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--suite",
        "nope",
        "--out",
        tmp.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("v").exists());
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["plan", "--alpha", "0.9"])
        .env("BURGERS_LEVELS_OUT", tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(tmp.path().join("plan-alpha0.9/plan.json").is_file());
}

#[test]
fn report_on_an_empty_directory_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["report", tmp.path().to_str().unwrap()])), 2);
}
