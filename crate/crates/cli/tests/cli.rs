use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pslseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pslseq")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn error_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn run_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fig5");
    let o = pslseq(&["run", &scenario("fig5_pmar.toml"), "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["sequence.csv", "metrics.json", "lags.csv", "trace.csv", "timing.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
    assert!(report["metrics"]["mpcl"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["converged"], true);
    let lags = read(&out, "lags.csv");
    assert!(lags.starts_with("lag,db\n1,"));
    assert_eq!(lags.lines().count(), 13);
    assert_eq!(read(&out, "sequence.csv").lines().count(), 14);
    assert_eq!(
        read(&out, "trace.csv").lines().count(),
        1 + report["iterations_used"].as_u64().unwrap() as usize
    );

    // the sequence file reads back into the same metrics
    let m = pslseq(&["metrics", out.join("sequence.csv").to_str().unwrap(), "--Q", "12"]);
    assert!(m.status.success());
    let file: serde_json::Value = serde_json::from_slice(&m.stdout).unwrap();
    assert_eq!(file["metrics"], report["metrics"]);
}

#[test]
fn repeated_runs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = (0..2).map(|i| tmp.path().join(i.to_string())).collect();
    for d in &dirs {
        let o = pslseq(&["run", &scenario("table1_rpoca.toml"), "--out-dir", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["sequence.csv", "metrics.json", "lags.csv", "trace.csv"] {
        assert_eq!(read(&dirs[0], f), read(&dirs[1], f), "{f}");
    }
}

#[test]
fn seed_override_changes_random_choices() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |seed: &str, dir: &str| {
        let d = tmp.path().join(dir);
        let o = pslseq(&[
            "run",
            &scenario("fig13_papr_1_2_n100_q30.toml"),
            "--seed",
            seed,
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        read(&d, "sequence.csv")
    };
    assert_ne!(run("1", "a"), run("2", "b"));
}

#[test]
fn gen_set_writes_members_and_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("set");
    let o = pslseq(&["gen-set", &scenario("welch_set_m4_n64.toml"), "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "set.json")).unwrap();
    assert_eq!(report["m"], 4);
    assert!(report["welch"]["ratio"].as_f64().unwrap() >= 1.0);
    assert!(report["initial_stats"]["mean"].is_number());
    assert_eq!(read(&out, "ccp.csv").lines().count(), 1 + 6);
    for i in 0..4 {
        assert!(out.join(format!("members/member_{i:03}.csv")).is_file());
    }
    // a single-sequence scenario is not a set
    let o = pslseq(&["gen-set", &scenario("fig5_pmar.toml"), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["field"], "set");
}

#[test]
fn failures_exit_with_a_record() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "name = \"bad\"\nalgorithm = \"poca\"\nn = 10\nq = 11\n").unwrap();
    let o = pslseq(&["run", bad.to_str().unwrap(), "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!((rec["kind"].as_str(), rec["field"].as_str()), (Some("validation"), Some("q")));
    assert!(!tmp.path().join("sequence.csv").exists());

    let o = pslseq(&["run", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["kind"], "io");

    let nan = tmp.path().join("nan.csv");
    fs::write(&nan, "index,re,im\n0,NaN,0\n").unwrap();
    let o = pslseq(&["metrics", nan.to_str().unwrap(), "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["field"], "sequence");

    let o = pslseq(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_convergence_is_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("short.toml");
    fs::write(&s, "name = \"short\"\nalgorithm = \"poca\"\nn = 32\nq = 20\nmax_iterations = 3\n").unwrap();
    let out = tmp.path().join("out");
    let o = pslseq(&["run", s.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
    assert_eq!(report["converged"], false);
    assert_eq!(report["warnings"].as_array().unwrap().len(), 1);
}
