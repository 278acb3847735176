//! End-to-end tests of the `lcd-reduce` binary: exit codes, output schemas,
//! determinism and the Gaussian-mixture workflow.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcd-reduce"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = bin(dir, args);
    assert!(
        out.status.success(),
        "`{}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema: &str, instance: &Value) {
    let schema = read_json(&schema_dir().join(schema));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["reduce", "x.csv"],
        &["reduce", "x.csv", "--L", "3", "--bogus"],
        &["generate", "spiral", "--n", "4"],
        &["reduce", "x.csv", "--L", "many"],
        &[],
    ] {
        let out = bin(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
    assert_eq!(bin(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.csv"), "x1,x2,x3,weight\n1,2,3,0.5\n1,2,0.5\n").unwrap();
    let out = bin(dir.path(), &["reduce", "short.csv", "--L", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("short.csv:3:"));

    assert_eq!(bin(dir.path(), &["reduce", "missing.csv", "--L", "1"]).status.code(), Some(2));

    ok(dir.path(), &["generate", "normal", "--n", "5", "--out", "five.csv"]);
    let out = bin(dir.path(), &["reduce", "five.csv", "--L", "6"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(dir.path().join("cfg.json"), r#"{"name": "unicorn"}"#).unwrap();
    let out = bin(dir.path(), &["experiment", "cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment `unicorn`"));

    std::fs::write(dir.path().join("cfg.json"), r#"{"name": "gm", "extra": true}"#).unwrap();
    assert_eq!(bin(dir.path(), &["experiment", "cfg.json"]).status.code(), Some(2));
}

#[test]
fn distance_to_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "normal", "--n", "50", "--seed", "4", "--out", "a.csv"]);
    for extra in [&[][..], &["--b-max", "3"], &["--cb", "1000"]] {
        let mut args = vec!["distance", "a.csv", "a.csv"];
        args.extend_from_slice(extra);
        let out = ok(dir.path(), &args);
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_valid("distance_report.schema.json", &report);
        assert!(report["total"].as_f64().unwrap().abs() < 1e-9, "{report}");
    }
}

#[test]
fn outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "outlier", "--n", "60", "--seed", "2", "--out", "o.csv"]);
    ok(d, &["reduce", "o.csv", "--L", "6", "--seed", "2", "--out", "r.csv", "--trace", "t.json"]);
    ok(d, &["baseline", "kmeans", "o.csv", "--L", "6", "--seed", "2", "--out", "k.csv"]);
    ok(d, &["compare", "o.csv", "r.csv", "k.csv", "--out", "c.json", "--hist-csv", "h.csv"]);
    assert_valid("reduce_trace.schema.json", &read_json(&d.join("t.json")));
    let compare = read_json(&d.join("c.json"));
    assert_valid("compare_report.schema.json", &compare);
    let names: Vec<&str> = compare["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["r", "k"]);
    let hist = std::fs::read_to_string(d.join("h.csv")).unwrap();
    assert!(hist.starts_with("set,axis,bin,lower,upper,mass\n"));
    assert_eq!(hist.lines().count(), 1 + 3 * 2 * 20);

    // Trace goes to stdout when only --out is given.
    let out = ok(d, &["reduce", "o.csv", "--L", "6", "--seed", "2", "--out", "r2.csv"]);
    assert_valid("reduce_trace.schema.json", &serde_json::from_slice(&out.stdout).unwrap());
    assert_eq!(std::fs::read(d.join("r.csv")).unwrap(), std::fs::read(d.join("r2.csv")).unwrap());
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            assert_valid("experiment_config.schema.json", &read_json(&path));
            lcd_reduce::experiment::ExperimentConfig::read(&path).unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}

#[test]
fn experiments_write_valid_summaries() {
    let dir = tempfile::tempdir().unwrap();
    for (name, extra) in [
        ("outlier", r#""baselines": {"random": true}"#),
        ("zebra", r#""generator": {"n": 400}, "reduce": {"target_count": 8}"#),
        ("gm", r#""generator": {"n": 400}, "reduce": {"target_count": 8}"#),
        ("histograms", r#""generator": {"n": 300}, "reduce": {"target_count": 6}"#),
        ("normal", r#""generator": {"n": 300}, "reduce": {"target_count": 6}"#),
    ] {
        let cfg = format!(r#"{{"name": "{name}", {extra}, "outputs": {{"dir": "{name}"}}}}"#);
        let cfg: Value = serde_json::from_str(&cfg).unwrap();
        assert_valid("experiment_config.schema.json", &cfg);
        std::fs::write(dir.path().join("cfg.json"), cfg.to_string()).unwrap();
        ok(dir.path(), &["experiment", "cfg.json"]);
        let summary = read_json(&dir.path().join(name).join("summary.json"));
        assert_valid("experiment_summary.schema.json", &summary);
        for f in summary["files"].as_array().unwrap() {
            assert!(dir.path().join(name).join(f.as_str().unwrap()).is_file());
        }
        match name {
            "outlier" => {
                let d = &summary["outlier"]["min_distance"];
                assert!(d["lcd"].is_number() && d["kmeans"].is_number() && d["random"].is_number());
            }
            "zebra" => {
                assert_eq!(summary["stripes"].as_array().unwrap().len(), 3);
                assert!(summary["original_count"].as_u64().unwrap() < 400);
                assert_eq!(summary["compare"]["methods"][0]["hist_l1"].as_array().unwrap().len(), 2);
            }
            "gm" => assert!(summary["compare"]["methods"][0]["mode_counts"].is_array()),
            _ => {}
        }
    }
}

#[test]
fn gaussian_mixture_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "gm", "--n", "4000", "--seed", "7", "--out", "gm.csv"]);
    ok(d, &["reduce", "gm.csv", "--L", "40", "--seed", "7", "--out", "r.csv"]);
    let out = ok(d, &["compare", "gm.csv", "r.csv", "--modes", "gm"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let counts: Vec<u64> = report["methods"][0]["mode_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(counts, [5, 15, 15, 5]);
}

#[test]
fn plots_are_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "normal", "--n", "80", "--dim", "1", "--out", "a.csv"]);
    ok(d, &["reduce", "a.csv", "--L", "4", "--out", "r.csv", "--trace", "t.json"]);
    for kind in ["scatter", "histogram"] {
        let out = ok(d, &["plot", kind, "a.csv", "--reduced", "r.csv", "--range-min", "-3", "--bins", "6"]);
        let svg = String::from_utf8(out.stdout).unwrap();
        assert!(svg.starts_with("<?xml") && svg.contains("<svg") && svg.ends_with("</svg>\n"));
    }
}

#[test]
fn commands_are_deterministic() {
    let run = |d: &Path| {
        ok(d, &["generate", "zebra", "--n", "300", "--seed", "9", "--out", "z.csv"]);
        ok(d, &["reduce", "z.csv", "--L", "5", "--seed", "9", "--multistart", "2", "--out", "r.csv", "--trace", "t.json"]);
        ok(d, &["baseline", "random", "z.csv", "--L", "5", "--seed", "9", "--out", "s.csv"]);
        ok(d, &["plot", "scatter", "z.csv", "--reduced", "r.csv", "--reduced", "s.csv", "--out", "p.svg"]);
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(a.path());
    run(b.path());
    let files = common::list_files(a.path());
    assert_eq!(files, common::list_files(b.path()));
    for f in files {
        assert_eq!(
            std::fs::read(a.path().join(&f)).unwrap(),
            std::fs::read(b.path().join(&f)).unwrap(),
            "{}",
            f.display()
        );
    }
}
