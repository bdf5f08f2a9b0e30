use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-dyn"))
        .args(args)
        .env_remove("PADIC_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

#[test]
fn orbit_inside_the_disk_stays_on_its_sphere() {
    let out = run(&["orbit", "--p", "5", "--a", "-1", "--x", "25", "--steps", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    let entries = doc["report"]["entries"].as_array().unwrap();
    // The start plus 100 iterates.
    assert_eq!(entries.len(), 101);
    assert!(entries.iter().all(|e| e["norm_exp"] == "2/1"));
    assert_eq!(doc["report"]["termination"]["kind"], "completed");
}

#[test]
fn orbit_from_a_pole_records_termination() {
    let out = run(&["orbit", "--p", "5", "--a", "-1", "--x", "1", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["termination"]["kind"], "hit_pole_at_step");
}

#[test]
fn near_pole_at_low_precision_exits_three() {
    // 15626 = 1 + 5^6 looks like the pole 1 at four digits but not at eight.
    let out = run(&["orbit", "--p", "5", "--a", "-1", "--x", "15626", "--precision", "4", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["report"]["termination"]["kind"], "precision_exhausted_at_step");
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(run(&["orbit", "--p", "4", "--a", "-1", "--x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", "--p", "5", "--a", "-1", "--x", "1/0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "ergodicity", "--p", "5", "--a", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cycles-p3", "--p", "5", "--a", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "radius-law", "--p", "5", "--a", "1", "--r", "1/3"]).status.code(), Some(2));
    assert_eq!(run(&["reduce", "--p", "5", "--coeffs", "0,1,0,1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense", "--p", "5"]).status.code(), Some(2));
}

#[test]
fn ergodicity_instance() {
    let out = run(&["verify", "ergodicity", "--p", "5", "--a", "-1", "--r", "1/5", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let report = &json(&out)["report"];
    assert_eq!(report["measure"]["num"], "1");
    assert_eq!(report["measure"]["den"], "20");
    assert_eq!(report["verdict"], "not_ergodic");
    assert_eq!(report["bound_attained"], true);
}

#[test]
fn cycle_suites_pass() {
    for args in [
        ["cycles-p5", "--p", "7", "--a", "-1", "--r", "1/7"],
        ["cycles-p2", "--p", "2", "--a", "1", "--r", "1/4"],
        ["cycles-p3", "--p", "3", "--a", "1", "--r", "1/27"],
    ] {
        let mut full = vec!["verify"];
        full.extend(args);
        full.extend(["--samples", "100"]);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["report"]["cycle"]["multiplier_is_nine"], true);
    }
}

#[test]
fn every_suite_passes_at_small_scale() {
    for args in [
        vec!["radius-law", "--p", "3", "--a", "-3"],
        vec!["spheres", "--p", "5", "--a", "-1"],
        vec!["spheres", "--p", "2", "--a", "-1", "--r", "1"],
        vec!["ball-image", "--p", "7", "--a", "3"],
        vec!["fixed-point", "--p", "2"],
    ] {
        let mut full = vec!["verify"];
        full.extend(args.iter().copied());
        full.extend(["--samples", "40"]);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["status"], "pass");
    }
}

#[test]
fn reduce_examples() {
    let report = json(&run(&["reduce", "--p", "5", "--coeffs", "1,0,0,1"]))["report"].clone();
    assert_eq!(report["fixed_point"]["unique"], true);
    assert_eq!(report["fixed_point"]["x0"]["valuation"], "inf");
    assert_eq!(report["fixed_point"]["classification"], "indifferent");
    assert_eq!(report["reduction"]["canonical"]["kind"], "fe");

    let report = json(&run(&["reduce", "--p", "5", "--coeffs", "1,1,-3,4"]))["report"].clone();
    assert_eq!(report["fixed_point"]["unique"], true);
    assert_eq!(report["fixed_point"]["x0"]["digits"][0], 1);
    assert_eq!(report["reduction"]["canonical"]["kind"], "out_of_scope_two_two");

    let out = run(&["reduce", "--p", "5", "--coeffs", "1,1,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["fixed_point"]["unique"], false);
}

#[test]
fn phi_and_measure() {
    let report = json(&run(&["phi", "--p", "5", "--a", "-1", "--r", "5"]))["report"].clone();
    assert_eq!(report["phi_exp"], "1/1");
    let report = json(&run(&["phi", "--p", "5", "--a", "-1", "--x", "6"]))["report"].clone();
    assert_eq!(report["phi_exp"], "-1/1");
    assert_eq!(report["limit_exp"], "1/1");
    assert_eq!(run(&["phi", "--p", "5", "--a", "-1", "--r", "1"]).status.code(), Some(2));
    let report = json(&run(&["measure", "--p", "5", "--a", "-1", "--r", "1/25"]))["report"].clone();
    assert_eq!(report["measure"]["num"], "1");
    assert_eq!(report["measure"]["den"], "500");
    assert_eq!(report["bound_attained"], false);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify", "spheres", "--p", "3", "--a", "2", "--samples", "30", "--seed", "0x2A"];
    let first = run(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "2"]);
    assert_eq!(first.stdout, run(&with_jobs).stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_padic-dyn"))
        .args(["verify", "spheres", "--p", "3", "--a", "2", "--samples", "30"])
        .env("PADIC_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(first.stdout, env.stdout);
}

#[test]
fn csv_has_one_row_per_sample() {
    let out = run(&["verify", "radius-law", "--p", "5", "--a", "-1", "--samples", "12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert!(reader.headers().unwrap().iter().any(|h| h == "verdict"));
    assert_eq!(reader.records().count(), 12);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("padic-dyn-{}.json", std::process::id()));
    let out = run(&["measure", "--p", "2", "--r", "1/2", "--rho", "1/8", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(doc["report"]["measure"]["num"], "1");
    assert_eq!(doc["report"]["measure"]["den"], "2");
}
