use std::path::Path;
use std::process::{Command, Output};

use rarebasis::maskfile::read_mask;
use rarebasis_core::oracle::DEFAULT_GUARD;
use serde_json::Value;

fn rarebasis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rarebasis")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_full_product_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", "n = 2\nk = 5\ngaps = [[1], [1]]\n");
    let out = rarebasis(&["verify", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["union_measure"]["decimal"], "80");
    assert_eq!(v["achieved_ratio"]["decimal"], "2.5");
    assert_eq!(v["oracle"]["status"], "checked");
    assert_eq!(v["oracle"]["agrees_with_analytic"], true);
}

#[test]
fn alpha_run_reports_both_constants() {
    let out = rarebasis(&["verify", "--n", "2", "--alpha", "1/32", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem1"]["k"], 5);
    assert_eq!(v["theorem1"]["per_k_constant"]["exact"], "1/2");
    assert_eq!(v["theorem1"]["log_constant"]["exact"], "5/12");
}

#[test]
fn soria_from_config_skips_oracle_beyond_guard() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "soria.toml",
        "k = 3\nwindow = \"0:160,0:160,0:160\"\nfamily = { kind = \"soria\", gamma = { kind = \"squares\", max_index = 12 } }\n",
    );
    let out = rarebasis(&["verify", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sequences"][2], serde_json::json!([0, 16, 36, 64]));
    assert_eq!(v["oracle"]["status"], "skipped");
    assert_eq!(v["pass"], true);
}

#[test]
fn sweep_csv_has_exact_ratios_and_slope() {
    let out = rarebasis(&["sweep", "--n", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,card_omega,union_measure,achieved_ratio,ratio_decimal,log_log_slope,status");
    assert_eq!(lines[4], "5,4,5*2^4,5*2^-1,2.5,,ok");
    assert_eq!(*lines.last().unwrap(), "slope,,,,,1.000000,");
}

#[test]
fn spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "window = \"0:8,0:8,0:8\"\nfamily = { kind = \"soria\", gamma = { kind = \"explicit\", values = [0, 4, 8] } }\n",
    );
    let out = rarebasis(&["spectrum", "--config", &cfg, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("w1,w2,w3\n0,0,0\n0,0,4\n0,0,8\n"));
    for line in text.lines().skip(1) {
        let t: Vec<i64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!([0, 4, 8].contains(&(t[2] + t[1])));
    }
}

#[test]
fn seeded_oracle_runs_fifty_trials() {
    let out = rarebasis(&["oracle-check", "--seed", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trials"].as_array().unwrap().len(), 50);
    assert_eq!(v["all_equal"], true);
}

#[test]
fn oracle_check_exports_mask() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("m.txt");
    let out = rarebasis(&["oracle-check", "--n", "2", "--k", "4", "--mask-out", mask.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m = read_mask(&std::fs::read_to_string(&mask).unwrap(), DEFAULT_GUARD).unwrap();
    assert_eq!(m.dims(), &[16, 16]);
    assert!(m.count_ones() > 0);
}

#[test]
fn is_check_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "shapes = [[0,3],[1,2],[2,1],[3,0]]\nplanar = { kind = \"sum_at_most\", bound = 3 }\n");
    let out = rarebasis(&["is-check", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["product"]["complete"], true);

    let bad = write(dir.path(), "q.toml", "shapes = [[0,3],[1,4]]\nplanar = { kind = \"sum_at_most\", bound = 3 }\n");
    assert_eq!(rarebasis(&["is-check", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn incomplete_spectrum_fails_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "k = 2\nsequences = [[0, 1, 2], [0, 1, 2]]\nfamily = { kind = \"explicit\", n = 2, tuples = [[0, 0], [2, 2]] }\n",
    );
    let out = rarebasis(&["complete", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["missing"], serde_json::json!([[1, 1]]));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "k = 3\nbogus = 1\n");
    assert_eq!(rarebasis(&["verify", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(rarebasis(&["verify", "--n", "3", "--k", "2"]).status.code(), Some(2));
    assert_eq!(rarebasis(&["verify", "--n", "2", "--alpha", "0.1"]).status.code(), Some(2));
}

#[test]
fn report_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = rarebasis(&["verify", "--n", "2", "--k", "3", "--format", "json", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
}
