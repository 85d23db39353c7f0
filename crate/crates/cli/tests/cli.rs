use std::io::Write;
use std::process::{Command, Output};

use explicit_sieve::sievebounds::Table1Row;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_explicit-sieve"))
        .args(args)
        .env_remove("EXPLICIT_SIEVE_PRECISION")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["analyze", "k^2+3"])), 0);
    // Unknown flag, bad polynomial, reducible factor, low precision.
    assert_eq!(code(&run(&["analyze", "k^2+3", "--bogus"])), 4);
    assert_eq!(code(&run(&["analyze", "k^^2"])), 4);
    assert_eq!(code(&run(&["lf", "k^2-1"])), 4);
    assert_eq!(code(&run(&["--precision", "5", "lf", "k"])), 4);
    // Conditions fail far below the threshold.
    assert_eq!(code(&run(&["find-x", "k^2+3", "--at", "1e3"])), 2);
    assert_eq!(code(&run(&["find-x", "k^2+3", "--grh", "--at", "5.4e7"])), 0);
    // The shifted problem refuses the factor k.
    assert_eq!(code(&run(&["tau", "k", "--shifted"])), 2);
}

#[test]
fn check_json_envelope() {
    let o = run(&["lf", "k^3-5", "--grh", "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["tool"], "explicit-sieve");
    assert_eq!(v["command"], "lf");
    assert_eq!(v["regime"], "grh");
    assert_eq!(v["precision_digits"], 40);
    assert!(v["provenance"].as_object().is_some_and(|m| !m.is_empty()));
    assert!(v["result"]["value"].is_object());
}

#[test]
fn config_file_then_flags() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# defaults\nregime = grh\nformat = json\nprecision = 30").unwrap();
    let path = f.path().to_str().unwrap();
    let v = stdout_json(&run(&["--config", path, "lf", "k^2+3"]));
    assert_eq!(v["regime"], "grh");
    assert_eq!(v["precision_digits"], 30);
    let v = stdout_json(&run(&["--config", path, "--precision", "50", "lf", "k^2+3"]));
    assert_eq!(v["precision_digits"], 50);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "colour = blue").unwrap();
    assert_eq!(code(&run(&["--config", bad.path().to_str().unwrap(), "lf", "k"])), 4);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_explicit-sieve"))
        .args(["lf", "k", "--json"])
        .env("EXPLICIT_SIEVE_PRECISION", "25")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&o)["precision_digits"], 25);
}

#[test]
fn csv_output_and_refusal() {
    let o = run(&["sg-count", "--limit", "100000", "--simple", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "N,pi_H(N),simple\n100000,1171,1171\n");
    // lf has no tabular form.
    assert_eq!(code(&run(&["lf", "k", "--csv"])), 4);
    let o = run(&["rho-table", "k^2+1", "--limit", "20", "--csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("p,rho\n2,1\n3,0\n5,2\n"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("count.csv");
    let o = run(&["count", "k^2+1", "--limit", "1000", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("1000,112,"));
}

#[test]
fn table1_rows_round_trip() {
    let o = run(&["table1", "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let rows: Vec<Table1Row> = serde_json::from_value(v["result"]["grh"].clone()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.within(0.10, 0.05)));
    let again = serde_json::to_value(&rows).unwrap();
    assert_eq!(again, v["result"]["grh"]);
    assert_eq!(v["result"]["unconditional"]["isolated"], true);
}
