use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensor-radon"))
        .args(args)
        .env("TENSOR_RADON_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    format!("--io.out={}", dir.display())
}

fn values(dir: &Path, command: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.json"))).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["values"].clone()
}

const SMALL: [&str; 3] = ["--grid.N=32", "--directions.count=64", "--transform.m=1"];

#[test]
fn zero_phantom_gives_zero_data() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(tmp.path());
    let o = run(&[&["forward", "--phantom.zero=true", &out][..], &SMALL].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for v in values(tmp.path(), "forward").as_array().unwrap() {
        assert_eq!(v[1].as_f64().unwrap(), 0.0, "{v}");
    }
}

#[test]
fn forward_then_invert_recovers_the_phantom() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(tmp.path());
    for cmd in ["phantom", "forward"] {
        let o = run(&[&[cmd, &out][..], &SMALL].concat());
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let reference = format!("--io.reference={}", tmp.path().join("phantom.tfld").display());
    let o = run(&[&["invert", &out, &reference][..], &SMALL].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vals = values(tmp.path(), "invert");
    let err = vals
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v[0] == "rel_l2_error")
        .and_then(|v| v[1].as_f64())
        .unwrap();
    assert!(err < 5e-2, "round trip error {err}");
    assert!(tmp.path().join("reconstruction.tfld").exists());
    assert!(tmp.path().join("v1.tfld").exists());
}

#[test]
fn failed_checker_exits_one() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(tmp.path());
    let o = run(&[&["range-check", &out, "--transform.form=pair", "--tolerances.range=1e-14"][..], &SMALL].concat());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["forward", "--grid.M=3"]).status.code(), Some(2));
    assert_eq!(run(&["forward", "--transform.signatures=some"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["phantom", "--grid.N=0"]).status.code(), Some(2));
}

#[test]
fn selftest_runs_selected_criteria() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["selftest", &out_arg(tmp.path()), "--selftest.criteria=[5]"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[PASS] criterion  5"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("selftest.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(run(&["selftest", &out_arg(tmp.path()), "--selftest.criteria=[42]"]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_three() {
    let tmp = TempDir::new().unwrap();
    let missing = format!("--io.input={}", tmp.path().join("absent.sino").display());
    let o = run(&["invert", &out_arg(tmp.path()), &missing]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn runs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        let out = out_arg(dir);
        for cmd in ["phantom", "forward"] {
            let o = run(&[&[cmd, &out, "--seed=7"][..], &SMALL].concat());
            assert!(o.status.success());
        }
    }
    for f in ["phantom.tfld", "phantom.json", "sino/frame_0-1.sino", "sino/frame_1-0.sino"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
    assert_eq!(values(a.path(), "forward"), values(b.path(), "forward"));
}

#[test]
fn config_file_and_overrides_combine() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\n[grid]\nN = 16\n[transform]\nm = 2\n").unwrap();
    let out = out_arg(tmp.path());
    let o = run(&["phantom", "--config", cfg.to_str().unwrap(), &out, "--grid.N=24"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = tensor_radon::io::read_field(tmp.path().join("phantom.tfld")).unwrap();
    assert_eq!(f.grid().samples(), 24);
    assert_eq!(f.order(), 2);
}

#[test]
fn summary_csv_lists_values() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["phantom", &out_arg(tmp.path()), "--grid.N=16"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(tmp.path().join("summary.csv")).unwrap();
    let keys: Vec<String> = r.records().map(|rec| rec.unwrap()[1].to_string()).collect();
    assert_eq!(keys, ["l2_norm", "max_abs", "mass_loss"]);
}
