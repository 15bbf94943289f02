use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use serde_json::Value;

use threshold_lab_cli::args::Cli;
use threshold_lab_cli::{run, CliError, REPORT_SCHEMA};

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_str().unwrap().to_string()
}

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("threshold-lab").chain(args.iter().copied())).unwrap()
}

fn run_text(args: &[&str]) -> String {
    run(&cli(args)).unwrap()
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Runs a JSON command, validates it against the published schema and
/// returns the `result` object.
fn run_json(args: &[&str]) -> Value {
    let report: Value = serde_json::from_str(&run_text(args)).unwrap();
    let v = validator();
    let errors: Vec<String> = v
        .iter_errors(&report)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    assert_eq!(report["schema"], "threshold-lab/1");
    report["result"].clone()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_threshold-lab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn family_reports() {
    let r = run_json(&["family", &data("a.json"), "--eps", "0.5"]);
    assert!(close(f(&r["p_c"]), 1.0 - 0.5f64.sqrt(), 1e-10));
    assert!(close(f(&r["q"]), 0.25, 1e-10));
    assert_eq!(r["ell0"], 1);
    assert_eq!(r["ell"], 2);
    assert_eq!(r["profile"], serde_json::json!([0, 2, 3, 1]));
    assert!(f(&r["cover"]["cost_at_q"]) <= 0.5);
    assert!(close(f(&r["bell_eps_bound"]), 12.0, 1e-9));

    let r = run_json(&["family", &data("single.json")]);
    assert!(close(f(&r["p_c"]), 0.5, 1e-12));
    assert!(close(f(&r["q"]), 0.5, 1e-12));
    assert!(r["bell_eps_bound"].is_null());
}

#[test]
fn trivial_family_is_a_named_error() {
    let err = run(&cli(&["family", &data("power_set.json")])).unwrap_err();
    assert_eq!(err.kind(), "trivial_upper_set");
    assert_eq!(err.exit_code(), 5);
    assert!(err.to_string().contains("trivial upper set"));
}

#[test]
fn conditional_reports() {
    let r = run_json(&["conditional", &data("a.json"), &data("b.json"), "--eps", "0.99"]);
    let ivs = r["intervals"].as_array().unwrap();
    assert_eq!(ivs.len(), 1);
    assert!(close(f(&ivs[0]["lo"]), 0.195217, 1e-4));
    assert!(close(f(&ivs[0]["hi"]), 0.889027, 1e-4));
    assert!(close(f(&r["epsilon_floor"]), 0.98051, 1e-4));
    assert!(close(f(&r["argmin_p"]), 0.582289, 1e-3));
    assert_eq!(r["gate_satisfied"], true);
    assert_eq!(r["samples"].as_array().unwrap().len(), 99);

    let r = run_json(&["conditional", &data("a_prime.json"), &data("b.json"), "--eps", "0.99"]);
    let ivs = r["intervals"].as_array().unwrap();
    assert!(close(f(&ivs[0]["lo"]), 0.173995, 1e-5));
    assert_eq!(f(&ivs[0]["hi"]), 1.0);
    assert_eq!(r["boundary_minimum"], true);

    let r = run_json(&["conditional", "--example", "a", "--eps", "0.5"]);
    assert!(r["intervals"].as_array().unwrap().is_empty());
    assert_eq!(r["status"], "below_floor");
    assert_eq!(r["message"], "eps below floor 0.98051");

    let r = run_json(&["conditional", "--example", "a"]);
    assert_eq!(r["status"], "floor_only");
}

#[test]
fn conditional_rejects_non_nested_pairs() {
    let err = run(&cli(&["conditional", &data("b.json"), &data("a.json")])).unwrap_err();
    assert_eq!(err.kind(), "not_subfamily");
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn conditional_csv_is_six_digit_samples() {
    let out = run_text(&["conditional", "--example", "a", "--samples", "3", "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,r,g");
    assert_eq!(lines.len(), 4);
    // r(1/2) = 2 - 2/1.5 = 2/3
    assert!(lines[2].starts_with("0.5,0.666667,"), "{}", lines[2]);
}

#[test]
fn poset_pipeline_on_the_example_poset() {
    let r = run_json(&[
        "poset",
        "--poset",
        &data("b_poset.json"),
        "--embedding",
        &data("b_embedding.json"),
        "--generated-by",
        "a,c",
        "--eps",
        "0.99",
    ]);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["upper_set"], serde_json::json!(["a", "c", "ac"]));
    let c = &r["conditional"];
    assert_eq!(f(&c["gate"]), 0.0);
    assert!(close(f(&c["epsilon_floor"]), 0.943874, 1e-5));
    assert!(close(f(&c["intervals"][0]["lo"]), 0.173995, 1e-5));
    let spot = &r["spot_checks"][0];
    assert_eq!(spot["passed"], true);
    // P(Y_p ∈ U) = (2p(1-p)^2 + p^2(1-p)) / (1-p) = p(2-p)
    let p = f(&spot["p"]);
    assert!(close(f(&spot["probability"]), p * (2.0 - p), 1e-12));
}

#[test]
fn poset_whole_upper_set_has_probability_one() {
    let r = run_json(&[
        "poset",
        "--poset",
        &data("chain.json"),
        "--downset",
        "--upper",
        "x,y,z",
        "--eps",
        "0.99",
    ]);
    for s in r["conditional"]["samples"].as_array().unwrap() {
        let p = f(&s["p"]);
        // A = B = {{x},{x,y},{x,y,z}}, <A> = sets containing x
        assert!(close(f(&s["r"]), 1.0 / p, 1e-9));
    }
    assert!(f(&r["conditional"]["epsilon_floor"]) < 1.0);
    for spot in r["spot_checks"].as_array().unwrap() {
        assert!(close(f(&spot["probability"]), 1.0, 1e-12));
    }
}

#[test]
fn poset_on_a_network() {
    // two edges, one weight: the poset is the Boolean square and the top
    // element is the full weighting, so A = {X} = <A> and B = 2^X
    let r = run_json(&[
        "poset",
        "--network",
        &data("path_graph.json"),
        "--generated-by",
        "{u-v:1,v-w:1}",
    ]);
    assert_eq!(r["poset_size"], 4);
    assert_eq!(r["status"], "hypothesis_unmet");
    let c = &r["conditional"];
    assert!(close(f(&c["q"]), 0.5f64.sqrt(), 1e-10));
    assert!(close(f(&c["gate"]), 48.0 * 0.5f64.sqrt(), 1e-8));
    for s in c["samples"].as_array().unwrap() {
        let p = f(&s["p"]);
        assert!(close(f(&s["r"]), 1.0, 1e-12));
        let expected = 1.0 - (1.0 - 2.0 * (-p / (48.0 * 0.5f64.sqrt())).exp2());
        assert!(close(f(&s["g"]), expected, 1e-12));
    }
}

#[test]
fn poset_input_errors_are_named() {
    let err = run(&cli(&[
        "poset",
        "--poset",
        &data("chain.json"),
        "--downset",
        "--upper",
        "x",
    ]))
    .unwrap_err();
    assert_eq!(err.kind(), "not_upper_set");
    let err = run(&cli(&[
        "poset",
        "--poset",
        &data("chain.json"),
        "--downset",
        "--upper",
        "q",
    ]))
    .unwrap_err();
    assert_eq!(err.kind(), "unknown_element");
    let err = run(&cli(&["poset", "--poset", &data("chain.json"), "--upper", "z"])).unwrap_err();
    assert_eq!(err.kind(), "invalid_config");
}

#[test]
fn repro_passes_by_default() {
    let r = run_json(&["paper-repro"]);
    assert_eq!(r["all_passed"], true);
    let checks = r["checks"].as_array().unwrap();
    let values: Vec<&Value> = checks.iter().filter(|c| c["tolerance"] == 1e-4).collect();
    assert_eq!(values.len(), 6);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(r["note"].as_str().unwrap().contains("{∅,{a},{c},{a,c}}"));
}

#[test]
fn repro_diagram_variant_fails_the_ratio_check() {
    let r = run_json(&["paper-repro", "--b-variant", "diagram"]);
    assert_eq!(r["all_passed"], false);
    assert_eq!(r["b_variant"], "diagram");
    let ratio = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "ratio_a_b")
        .unwrap();
    assert_eq!(ratio["pass"], false);
}

#[test]
fn repro_with_tighter_tolerance() {
    let r = run_json(&["paper-repro", "--tol", "1e-9", "--grid", "20000"]);
    assert_eq!(r["all_passed"], true);
}

#[test]
fn repro_csv_table() {
    let out = run_text(&["paper-repro", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("check,claim,claimed,computed,abs_diff,tolerance,pass")
    );
    let floor = out.lines().find(|l| l.starts_with("floor_a_b,")).unwrap();
    assert!(floor.starts_with("floor_a_b,0.98051,0.98051,0.98051,"), "{floor}");
    assert!(floor.ends_with(",0.0001,true"));
}

#[test]
fn mc_estimates_match_exact_values() {
    let r = run_json(&[
        "mc",
        &data("a.json"),
        "--given",
        &data("b.json"),
        "--p",
        "0.5",
        "--samples",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(r["mode"], "conditional");
    assert_eq!(f(&r["exact"]), 0.5);
    assert_eq!(r["exact_in_interval"], true);
    assert!(close(f(&r["acceptance_rate"]), 0.5, 0.02));

    let r = run_json(&["mc", &data("a.json"), "--up", "--p", "0.5", "--seed", "1"]);
    assert_eq!(r["mode"], "family");
    assert_eq!(f(&r["exact"]), 0.75);
    assert_eq!(r["exact_in_interval"], true);

    let err = run(&cli(&["mc", &data("a.json"), "--p", "1.5"])).unwrap_err();
    assert_eq!(err.kind(), "invalid_probability");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cases: Vec<Vec<String>> = vec![
        vec!["family".into(), data("a.json")],
        vec![
            "conditional".into(),
            data("a.json"),
            data("b.json"),
            "--eps".into(),
            "0.99".into(),
        ],
        vec!["paper-repro".into(), "--format".into(), "csv".into()],
        vec![
            "mc".into(),
            data("a.json"),
            "--given".into(),
            data("b.json"),
            "--p".into(),
            "0.3".into(),
            "--seed".into(),
            "11".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run_text(&args), run_text(&args), "{args:?}");
    }
    let mc = |seed: &str| run_text(&["mc", &data("a.json"), "--p", "0.3", "--seed", seed]);
    assert_ne!(mc("1"), mc("2"));
}

#[test]
fn config_is_validated() {
    for args in [
        vec!["--tol", "0", "paper-repro"],
        vec!["--grid", "99", "paper-repro"],
        vec!["--K=-1", "paper-repro"],
        vec!["--eps", "1", "paper-repro"],
    ] {
        let err: CliError = run(&cli(&args)).unwrap_err();
        assert_eq!(err.kind(), "invalid_config", "{args:?}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn binary_exit_codes() {
    let ok = binary(&["family", &data("a.json"), "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("q,0.25"));

    let trivial = binary(&["family", &data("power_set.json")]);
    assert_eq!(trivial.status.code(), Some(5));
    assert!(String::from_utf8(trivial.stderr)
        .unwrap()
        .starts_with("error[trivial_upper_set]"));

    let dir = std::env::temp_dir().join(format!("threshold-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let malformed = dir.join("bad.json");
    std::fs::write(&malformed, "{\"ground\": [\"a\"], \"sets\": [[\"z\"]]}").unwrap();
    let bad = binary(&["family", malformed.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .starts_with("error[unknown_label]"));
    std::fs::write(&malformed, "{not json").unwrap();
    let bad = binary(&["family", malformed.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .starts_with("error[malformed_input]"));
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(binary(&["family", "/nonexistent/x.json"]).status.code(), Some(3));
    assert_eq!(binary(&["--grid", "10", "paper-repro"]).status.code(), Some(2));
    assert_eq!(binary(&["no-such-command"]).status.code(), Some(2));
}
