use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use titsforge::Field;
use titsforge_cli::format::AlgebraFile;
use titsforge_cli::tables::{Golden, TableKind};
use titsforge_cli::*;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_titsforge"));
    c.env_remove(SEED_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("titsforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn build_then_analyze() {
    let p = tmp("g33.json");
    let o = run(&["build", "g", "b12", "b12", "--field", "fp:3", "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let v = json_out(&a);
    assert_eq!(v["dims"], serde_json::json!([21, 16]));
    assert_eq!(v["jacobi"], "pass");
    assert_eq!(v["simple"], "Simple");
}

#[test]
fn e8_summary() {
    let p = tmp("e8.json");
    let o = run(&["build", "tits", "octonion", "h3:octonion", "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&run(&["analyze", p.to_str().unwrap()]));
    for (k, want) in [("dims", serde_json::json!([248, 0])), ("jacobi", "pass".into()), ("derived", 248.into()), ("center", 0.into()), ("simple", "Simple".into())] {
        assert_eq!(v[k], want, "{k}");
    }
}

#[test]
fn g23_witness() {
    let p = tmp("g23.json");
    assert_eq!(run(&["build", "g", "binarion", "b12", "--field", "fp:3", "-o", p.to_str().unwrap()]).status.code(), Some(0));
    let v = json_out(&run(&["analyze", p.to_str().unwrap(), "--simplicity"]));
    assert_eq!(v["simple"]["NotSimple"]["dims"], serde_json::json!([10, 14]));
    assert_eq!(v["simple"]["NotSimple"]["basis"].as_array().unwrap().len(), 24);
}

#[test]
fn forced_failure_is_recorded() {
    let p = tmp("d3.json");
    let o = run(&["build", "tits", "octonion", "dt:3", "--field", "q", "--force", "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert!(file["jacobi"].get("fail").is_some());
    assert_eq!(file["provenance"]["forced"], true);
    assert_eq!(run(&["analyze", p.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["build", "tits", "octonion", "dt:3"]).status.code(), Some(2));
}

#[test]
fn gating_and_usage_errors() {
    let o = run(&["build", "g", "b12", "b12", "--field", "fp:5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b12 requires characteristic 3"));
    assert_eq!(run(&["build", "tits", "quaternion", "j02", "--field", "fp:3"]).status.code(), Some(2));
    assert_eq!(run(&["build", "tits", "sedenion", "j02"]).status.code(), Some(2));
    assert_eq!(run(&["table", "magic", "--field", "fp:3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn corrupted_file_reports_location() {
    let p = tmp("bad.json");
    std::fs::write(&p, r#"{"field": {"char": 3}, "basis": [{"label": "x", "parity": 0}], "brackets": [[0, 0, 7, "1"]]}"#).unwrap();
    let o = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.brackets[0]"));
    std::fs::write(&p, "{\"field\": ").unwrap();
    let o = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn ch3_exit_codes() {
    assert_eq!(run(&["ch3", "dt:2", "--field", "q"]).status.code(), Some(0));
    assert_eq!(run(&["ch3", "dt:3", "--field", "q"]).status.code(), Some(1));
    assert_eq!(run(&["ch3", "k10", "--field", "fp:5"]).status.code(), Some(0));
    assert_eq!(run(&["ch3", "k10", "--field", "fp:7"]).status.code(), Some(1));
}

#[test]
fn seed_flag_and_environment() {
    let o = run(&["ch3", "dt:2"]);
    assert_eq!(json_out(&o)["seed"], titsforge::analyze::DEFAULT_SEED);
    let o = bin().args(["ch3", "dt:2"]).env(SEED_ENV, "0x2a").output().unwrap();
    assert_eq!(json_out(&o)["seed"], 42);
    let o = bin().args(["ch3", "dt:2", "--seed", "7"]).env(SEED_ENV, "42").output().unwrap();
    assert_eq!(json_out(&o)["seed"], 7);
    let o = bin().args(["ch3", "dt:2"]).env(SEED_ENV, "nope").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analysis_is_deterministic() {
    let p = tmp("g28.json");
    run(&["build", "g", "binarion", "octonion", "--field", "fp:3", "-o", p.to_str().unwrap()]);
    let a = run(&["analyze", p.to_str().unwrap(), "--simplicity", "--killing", "--seed", "11"]);
    let b = run(&["analyze", p.to_str().unwrap(), "--simplicity", "--killing", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_json_has_commands() {
    let o = run(&["table", "magic3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 16);
    assert!(cells.iter().all(|c| c["command"].as_str().unwrap().starts_with("titsforge build g ")));
    let o = run(&["table", "rectangle", "--field", "fp:7", "--json"]);
    let v = json_out(&o);
    assert_eq!(v["cells"].as_array().unwrap().iter().filter(|c| c["status"] == "gated").count(), 4);
}

/// Emitting and re-reading a file must not change the analysis.
#[test]
fn file_round_trip_preserves_reports() {
    for (kind, f) in [(TableKind::Supermagic, Field::Prime(3)), (TableKind::Magic, Field::Rational)] {
        let g = Golden::load(kind);
        for (i, row) in g.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if cell.as_ref().is_none_or(|c| c.dims.0 + c.dims.1 > 140) {
                    continue;
                }
                let args = BuildArgs {
                    construction: g.construction.parse().unwrap(),
                    first: g.rows[i].clone(),
                    second: g.columns[j].clone(),
                    field: f,
                    force: false,
                    seed: 1,
                };
                let alg = build_algebra(&args).map_err(|e| e.1).unwrap();
                let file = AlgebraFile::from_algebra(&alg);
                let back = AlgebraFile::parse(&file.emit()).unwrap();
                assert_eq!(back, file);
                let aa = AnalyzeArgs { simplicity: true, ..Default::default() };
                assert_eq!(analyze_file(&file, &aa).unwrap(), analyze_file(&back, &aa).unwrap());
            }
        }
    }
}
