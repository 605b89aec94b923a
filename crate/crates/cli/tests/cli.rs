use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlab"))
        .args(args)
        .env_remove("MLAB_THREADS")
        .output()
        .expect("spawn mlab")
}

fn manifest(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("manifest on stdout")
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn invariants_writes_fields_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let m = manifest(&mlab(&["invariants", "--surface", "cylinder", "--n", "32", "--out", out.to_str().unwrap()]));
    let files: Vec<String> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| Path::new(f.as_str().unwrap()).file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(files, ["omega.csv", "H.csv", "kappa.csv", "report.json"]);
    for f in &files {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let stored: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(stored["result"], m["result"]);
    for key in ["subcommand", "version", "params", "inputs", "files", "wall_time_s", "result"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(m["params"]["surface"], "cylinder");
    assert_eq!(m["params"]["n"], 32);
    // Moebius area of the catalog cylinder chart, a quarter of the circumference.
    let area = m["result"]["scalars"]["mobius_area"].as_f64().unwrap();
    assert!((area - std::f64::consts::FRAC_PI_2).abs() < 1e-9, "{area}");
}

#[test]
fn flat_hazzidakis_follows_two_over_s() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let m = manifest(&mlab(&[
        "hazzidakis", "--type", "C", "--flat", "--kmobius", "-1", "--s0", "1", "--s-end", "3", "--step", "1e-3",
        "--out", out.to_str().unwrap(),
    ]));
    assert_eq!(m["result"]["stop"], "completed");
    assert_eq!(m["result"]["flat"]["flat"], true);
    let csv = out.join("hazzidakis.csv");
    let s = column(&csv, "s");
    let h = column(&csv, "H");
    assert_eq!(s.len(), 2001);
    let worst = s.iter().zip(&h).map(|(s, h)| (h - 2.0 / s).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn exit_codes_follow_error_category() {
    assert_eq!(mlab(&["invariants", "--surface", "no-such-surface"]).status.code(), Some(2));
    assert_eq!(mlab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(mlab(&["invariants"]).status.code(), Some(64));
    assert_eq!(
        mlab(&["hazzidakis", "--type", "C", "--s0", "1", "--s-end", "2", "--step", "0.1"]).status.code(),
        Some(64)
    );
    assert_eq!(mlab(&["--help"]).status.code(), Some(0));
    // Too few samples for the stencils is a domain error.
    assert_eq!(mlab(&["curve", "measure", "--circle", "1", "--n", "3"]).status.code(), Some(2));
    // A blow-up inside the integration range stops with a numerical failure or a
    // reported stop reason, never a crash.
    let blow = mlab(&["hazzidakis", "--type", "A", "--s0", "1", "--H0", "1", "--Hs0", "-50", "--Hss0", "1e4",
        "--s-end", "1e6", "--step", "1e-2"]);
    assert!(matches!(blow.status.code(), Some(0) | Some(3)), "{:?}", blow.status);
}

#[test]
fn threads_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_mlab"))
        .args(["catalog", "list"])
        .env("MLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_bit_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("r{k}"));
        let st = Command::new(env!("CARGO_BIN_EXE_mlab"))
            .args(["invariants", "--surface", "enneper", "--n", "48", "--out", out.to_str().unwrap()])
            .env("MLAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(st.status.success());
        runs.push(read_all(&out));
    }
    assert_eq!(runs[0].len(), 3);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn graph_surfaces_are_accepted() {
    let m = manifest(&mlab(&[
        "invariants", "--graph", "x*x + y*y", "--domain", "0.2", "1", "-0.5", "0.5", "--n", "24",
    ]));
    assert_eq!(m["result"]["derivatives"], "finite_difference");
    assert_eq!(m["params"]["domain"], serde_json::json!([0.2, 1.0, -0.5, 0.5]));
    assert_eq!(mlab(&["invariants", "--graph", "x +* y"]).status.code(), Some(64));
}

#[test]
fn curve_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let evolve = dir.path().join("evolve");
    let m = manifest(&mlab(&[
        "curve", "evolve", "--u0", "0.5 + 0.2*math::cos(s)", "--n", "128", "--steps", "40", "--dump-every", "20",
        "--out", evolve.to_str().unwrap(),
    ]));
    assert_eq!(m["result"]["frames"], 3);
    let drift = (m["result"]["mean_final"].as_f64().unwrap() - 0.5).abs();
    assert!(drift < 1e-12, "{drift}");

    let rec = dir.path().join("rec");
    let frame = evolve.join("frame_00002.csv");
    let m = manifest(&mlab(&[
        "curve", "reconstruct", "--input", frame.to_str().unwrap(), "--out", rec.to_str().unwrap(),
    ]));
    assert_eq!(m["inputs"][0], frame.to_str().unwrap());
    assert_eq!(column(&rec.join("curve.csv"), "x").len(), 128);
}

#[test]
fn residuals_on_the_cylinder() {
    let m = manifest(&mlab(&["residuals", "--surface", "cylinder", "--n", "128", "--q", "-0.125"]));
    let by_name = |n: &str| {
        m["result"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == n)
            .unwrap_or_else(|| panic!("{n} missing"))
            .clone()
    };
    assert_eq!(by_name("gauss")["pass"], true);
    assert_eq!(by_name("isothermic_form")["pass"], true);
    assert_eq!(by_name("willmore")["pass"], false);
    assert_eq!(by_name("constrained_willmore")["pass"], true);
}

#[test]
fn deform_families_report_preserved_quantities() {
    for (family, param) in [("t", "0.5"), ("cw", "1.0"), ("bonnet", "0.7"), ("himc", "0.3")] {
        let m = manifest(&mlab(&[
            "deform", "--surface", "cylinder", "--n", "48", "--family", family, "--param", param,
        ]));
        let kept = m["result"]["preserved"].as_object().unwrap();
        for (k, v) in kept {
            assert!(v.as_f64().unwrap() < 1e-9, "{family} {k} {v}");
        }
    }
    let m = manifest(&mlab(&["deform", "--surface", "enneper", "--n", "48", "--family", "lambda", "--param", "1;0.1"]));
    assert!(m["result"]["preserved"]["mobius_factor"].as_f64().unwrap() < 1e-9);
    assert_eq!(mlab(&["deform", "--surface", "cylinder", "--family", "t", "--param", "1x"]).status.code(), Some(64));
}

#[test]
fn lightcone_checks_pass_on_the_sphere() {
    let m = manifest(&mlab(&["lightcone", "--surface", "sphere", "--n", "32"]));
    let r = &m["result"];
    assert_eq!(r["lightcone"]["future_pointing"], true);
    assert!(r["lightcone"]["max_relative"].as_f64().unwrap() < 1e-12);
    assert!(r["congruence"]["max_relative"].as_f64().unwrap() < 1e-12);
}

#[test]
fn selftest_single_criterion() {
    let out = mlab(&["selftest", "--criterion", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8_lossy(&out.stderr);
    assert!(line.starts_with("criterion 6 [PASS]"), "{line}");
    assert_eq!(mlab(&["selftest", "--criterion", "10"]).status.code(), Some(64));
}
