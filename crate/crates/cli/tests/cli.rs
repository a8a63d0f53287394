use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn repo(rel: &str) -> String {
    root().join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
        .args(args)
        .env_remove("BLASCHKE_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn error_of(out: &Output) -> Value {
    json(&out.stderr)["error"].clone()
}

#[test]
fn compute_prints_a_manifest_with_the_result_inline() {
    let square = repo("specs/square.json");
    let out = run(&["compute", &square]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out.stdout);
    assert_eq!(m["command"], "compute");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!((m["result"]["mass"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!((m["result"]["w1"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn sum_writes_a_function_document_that_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let sum = dir.path().join("sum.json");
    let svg = dir.path().join("sum.svg");
    let square = repo("specs/square.json");
    let out = run(&["sum", &square, &square, "-o", sum.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out.stdout);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert!(m.get("result").is_none());
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let back = run(&["compute", sum.to_str().unwrap()]);
    assert_eq!(code(&back), 0);
    // Two copies of the same surface area pair: the square at height 2.
    let r = &json(&back.stdout)["result"];
    assert!((r["mass"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert!((r["w1"].as_f64().unwrap() - 16.0).abs() < 1e-9);
}

#[test]
fn iterate_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let square = repo("specs/square.json");
    let mut files = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("trace{k}.csv"));
        let out = run(&["iterate", &square, "--steps", "6", "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert!(text.starts_with("step,angle,w1,mass,entropy,omega_sharp,cosmic_distance,atoms,quantized,status\n"));
    assert_eq!(text.lines().count(), 8);
    assert!(!text.to_lowercase().contains("nan"));
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for row in rows.records() {
        let row = row.unwrap();
        assert!((row[2].parse::<f64>().unwrap() - 8.0).abs() < 1e-9, "W1 is invariant");
        assert_eq!(&row[9], "ok");
    }
}

#[test]
fn malformed_json_reports_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"kind\":\n \"indicator\",, }").unwrap();
    let out = run(&["compute", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let e = error_of(&out);
    assert_eq!(e["kind"], "parse");
    assert_eq!(e["details"]["line"], 2);
}

#[test]
fn non_admissible_pair_is_rejected_with_its_defect() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    fs::write(&pair, r#"{"kind":"pair","dim":2,"mu":[[1,0,1]],"nu":[]}"#).unwrap();
    let out = run(&["compute", pair.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let e = error_of(&out);
    assert_eq!(e["details"]["centered"], false);
    assert_eq!(e["details"]["defect"][0].as_f64(), Some(1.0));
}

#[test]
fn non_convex_radial_profile_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"kind":"radial","dim":2,"knots":[[0,0],[1,2],[2,2.5]],"tail_slope":1}"#).unwrap();
    let out = run(&["compute", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(error_of(&out)["kind"], "validation");
}

#[test]
fn solver_iteration_cap_exits_with_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let extracted = run(&["compute", &repo("corpus/bounded-05.json")]);
    assert_eq!(code(&extracted), 0);
    let pair = dir.path().join("pair.json");
    fs::write(&pair, serde_json::to_vec(&json(&extracted.stdout)["result"]["pair"]).unwrap()).unwrap();

    let solved = run(&["compute", pair.to_str().unwrap()]);
    assert_eq!(code(&solved), 0, "{}", String::from_utf8_lossy(&solved.stderr));
    let capped = run(&["compute", pair.to_str().unwrap(), "--max-iter", "1"]);
    assert_eq!(code(&capped), 3);
    let e = error_of(&capped);
    assert_eq!(e["details"]["converged"], false);
    assert!(!e["details"]["iterates"].as_array().unwrap().is_empty());
}

#[test]
fn optimizer_cap_still_writes_the_best_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("asa.json");
    let out = run(&["asa", &repo("specs/square.json"), "--max-iter", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out.stdout)["exit_code"], 4);
    let v = json(&fs::read(&path).unwrap());
    assert_eq!(v["stalled"], true);
    assert!(v["value"].as_f64().unwrap().is_finite());
}

#[test]
fn flags_without_effect_are_rejected() {
    let square = repo("specs/square.json");
    assert_eq!(code(&run(&["sum", &square, &square, "--grid", "16"])), 2);
    assert_eq!(code(&run(&["compute", &square, "--seed", "3"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let svg = dir.path().join("r.svg");
    let out = run(&["verify", "--suite", "petty", "--corpus", &repo("corpus"), "-o", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!csv.exists() && !svg.exists());
}

#[test]
fn unknown_suite_lists_the_known_ones() {
    let out = run(&["verify", "--suite", "nonsense", "--corpus", &repo("corpus")]);
    assert_eq!(code(&out), 2);
    let known = error_of(&out)["details"]["known_suites"].clone();
    assert!(known.as_array().unwrap().iter().any(|s| s == "petty"));
}

#[test]
fn seed_variable_takes_precedence_over_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
        .args(["corpus", "--seed", "1", "-o", dir.path().to_str().unwrap()])
        .env("BLASCHKE_LAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out.stdout)["config"]["seed"], 7);
}

#[test]
fn checked_in_corpus_is_the_default_generated_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["corpus", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let names = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        v.sort();
        v
    };
    let checked_in = root().join("corpus");
    assert_eq!(names(dir.path()), names(&checked_in));
    for name in names(&checked_in) {
        assert_eq!(fs::read(dir.path().join(&name)).unwrap(), fs::read(checked_in.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn verify_on_the_corpus_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("report{k}.csv"));
        let out = run(&["verify", "--suite", "petty,omega_covariance", "--corpus", &repo("corpus"), "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        tables.push(fs::read(&path).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let mut rows = csv::Reader::from_reader(tables[0].as_slice());
    let mut n = 0;
    for row in rows.records() {
        let row = row.unwrap();
        assert_eq!(&row[8], "true", "{row:?}");
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn homothety_writes_the_solver_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&["homothety", &repo("specs/linf.json"), "--lambda", "2", "--solver-trace", trace.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // Offsets move by log 2 and the cells keep their shape.
    let f = &json(&out.stdout)["result"];
    for piece in f["pieces"].as_array().unwrap() {
        assert!((piece[2].as_f64().unwrap().abs() - 2f64.ln()).abs() < 1e-9, "{piece}");
    }
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,residual,step\n"));
    assert!(text.lines().count() >= 2);

    assert_eq!(code(&run(&["homothety", &repo("specs/linf.json"), "--lambda", "-1"])), 2);
    assert_eq!(code(&run(&["compute", &repo("specs/linf.json"), "--solver-trace", trace.to_str().unwrap()])), 2);
}

#[test]
fn failed_solve_still_writes_its_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&["symmetral", &repo("corpus/bounded-05.json"), "--angle", "0.3", "--max-iter", "1", "--solver-trace", trace.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert_eq!(error_of(&out)["details"]["trace_file"], trace.to_str().unwrap());
    let rows = fs::read_to_string(&trace).unwrap().lines().count() - 1;
    assert_eq!(rows, error_of(&out)["details"]["iterates"].as_array().unwrap().len());
}

#[test]
fn report_flag_and_range_grid() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = run(&["verify", "--suite", "mixed_volume", "--corpus", &repo("corpus"), "--t-grid", "0.1..0.5", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stdout)["config"]["suite"]["t_grid"].as_array().unwrap().len(), 5);
    assert!(report.exists());
    let both = run(&["verify", "--suite", "mixed_volume", "--report", report.to_str().unwrap(), "-o", report.to_str().unwrap()]);
    assert_eq!(code(&both), 2);
}
