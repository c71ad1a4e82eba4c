use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pnet::dataset_file::{parse_dataset, read_manifest};
use pnet::network_file::{network_to_string, parse_network, parse_network_str};
use pnet_core::estimator::possibilistic_loglik;
use tempfile::TempDir;

fn chain3() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/chain3.json")
}

fn alarm4() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/alarm4.json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pnet").chain(args.iter().copied());
    let code = pnet::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnet")).args(args).envs(env.iter().copied()).output().unwrap()
}

fn sample(dir: &TempDir, net: &Path, theta: &str, n: &str) -> PathBuf {
    let out = dir.path().join("data.csv");
    let (code, _, err) = run(&["sample", "--net", s(net), "--n", n, "--theta", theta, "--seed", "3", "--out", s(&out)]);
    assert_eq!(code, 0, "{err}");
    out
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["sample", "learn", "score", "evaluate"] {
        assert!(out.contains(sub), "help lists {sub}");
    }
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn usage_errors_exit_2() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    // --seed is mandatory.
    let (code, _, err) = run(&["sample", "--net", s(&chain3()), "--n", "5", "--theta", "0.5", "--out", "x.csv"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"), "{err}");
    assert_eq!(run(&["score", "--net", s(&chain3()), "--data", "d.csv", "--bogus"]).0, 2);
    assert_eq!(
        run(&["sample", "--net", s(&chain3()), "--n", "5", "--theta", "0.5", "--seed", "1", "--mode", "fuzzy", "--out", "x"]).0,
        2
    );
}

#[test]
fn sample_writes_dataset_and_manifest() {
    let dir = TempDir::new().unwrap();
    let data = sample(&dir, &alarm4(), "0.5", "200");
    let net = parse_network(&alarm4()).unwrap();
    let parsed = parse_dataset(&data, net.variables()).unwrap();
    assert_eq!(parsed.len(), 200);
    assert!(!parsed.is_precise());
    let manifest = read_manifest(&data).unwrap();
    assert_eq!((manifest.mode.as_str(), manifest.n, manifest.seed), ("imprecise", 200, 3));
    assert_eq!((manifest.theta_imp, manifest.tolerance), (0.5, 1e-9));

    let precise = dir.path().join("precise.csv");
    let (code, _, _) = run(&[
        "sample", "--net", s(&alarm4()), "--n", "100", "--theta", "0.9", "--seed", "3", "--mode", "precise", "--out",
        s(&precise),
    ]);
    assert_eq!(code, 0);
    assert!(parse_dataset(&precise, net.variables()).unwrap().is_precise());
    assert_eq!(read_manifest(&precise).unwrap().mode, "precise");
}

#[test]
fn theta_is_validated() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d.csv");
    let (code, _, err) = run(&["sample", "--net", s(&chain3()), "--n", "5", "--theta", "1.5", "--seed", "1", "--out", s(&out)]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: "), "{err}");
    assert!(!out.exists());
}

#[test]
fn learn_then_score_matches_library() {
    let dir = TempDir::new().unwrap();
    let data = sample(&dir, &chain3(), "0", "300");
    let learned = dir.path().join("learned.json");
    let (code, _, err) = run(&[
        "learn", "--structure", s(&chain3()), "--data", s(&data), "--estimator", "pml", "--out", s(&learned),
    ]);
    assert_eq!(code, 0, "{err}");

    let (code, out, err) = run(&["score", "--net", s(&learned), "--data", s(&data)]);
    assert_eq!(code, 0, "{err}");
    let printed: f64 = out.trim().parse().unwrap();
    assert!(printed.is_finite());

    let net = parse_network(&learned).unwrap();
    let records = parse_dataset(&data, net.variables()).unwrap();
    assert_eq!(printed, possibilistic_loglik(&net, &records).unwrap());
    assert!(net.is_normalized());
}

#[test]
fn learn_options() {
    let dir = TempDir::new().unwrap();
    let data = sample(&dir, &alarm4(), "0.6", "300");
    let out = dir.path().join("out.json");
    let structure = alarm4();
    let learn = |extra: &[&str]| {
        let mut args = vec!["learn", "--structure", s(&structure), "--data", s(&data), "--out", s(&out)];
        args.extend_from_slice(extra);
        run(&args)
    };

    assert_eq!(learn(&["--estimator", "histogram", "--semantics", "min"]).0, 0);
    assert!(fs::read_to_string(&out).unwrap().contains("\"semantics\": \"min\""));

    assert_eq!(learn(&["--budget", "mean-card"]).0, 0);
    let mean_card = parse_network(&out).unwrap();
    assert_eq!(learn(&[]).0, 0);
    let unit = parse_network(&out).unwrap();
    for (a, b) in mean_card.tables().iter().zip(unit.tables()) {
        for (ra, rb) in a.rows().iter().zip(b.rows()) {
            for (x, y) in ra.degrees().iter().zip(rb.degrees()) {
                assert!((x - y).abs() <= 1e-9, "normalization cancels the budget");
            }
        }
    }

    let budget = dir.path().join("budget.json");
    fs::write(&budget, r#"{"Alarm": 2.5}"#).unwrap();
    assert_eq!(learn(&["--budget", s(&budget)]).0, 0);
    fs::write(&budget, r#"{"Nope": 2.5}"#).unwrap();
    let (code, _, err) = learn(&["--budget", s(&budget)]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown variable Nope"), "{err}");
    fs::write(&budget, r#"{"Alarm": -1}"#).unwrap();
    assert_eq!(learn(&["--budget", s(&budget)]).0, 2);

    assert_eq!(learn(&["--estimator", "rset"]).0, 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rows = doc["masses"]["Alarm"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let total: f64 = row.as_array().unwrap().iter().map(|f| f["mass"].as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn learned_networks_round_trip() {
    let dir = TempDir::new().unwrap();
    let data = sample(&dir, &alarm4(), "0.4", "150");
    let out = dir.path().join("net.json");
    let structure = alarm4();
    let args = ["learn", "--structure", s(&structure), "--data", s(&data), "--out", s(&out)];
    assert_eq!(run(&args).0, 0);
    let text = fs::read_to_string(&out).unwrap();
    let reparsed = parse_network_str(&text, "net.json").unwrap();
    assert_eq!(network_to_string(&reparsed), text);
}

#[test]
fn evaluate_populates_every_field() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.txt");
    let (code, _, err) = run(&[
        "evaluate", "--gold", s(&chain3()), "--n", "1000", "--theta", "0.5", "--seed", "7", "--report", s(&report),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&report).unwrap();
    let fields: Vec<(&str, &str)> = text.lines().map(|l| l.split_once('=').unwrap()).collect();
    let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
    for key in [
        "gold", "records", "theta_imp", "seed", "mode", "estimator", "semantics", "holdout_fraction", "train_records",
        "holdout_records", "omega_cap", "budget.A", "cpt_distance.C", "mean_cpt_distance", "joint_distance",
        "holdout_loglik_gold", "holdout_loglik_learned", "holdout_loglik_learned_raw",
    ] {
        assert!(keys.contains(&key), "missing {key}");
    }
    assert!(fields.iter().all(|(_, v)| !v.is_empty() && *v != "none"), "{text}");
    assert!(text.contains("train_records=800\n") && text.contains("holdout_records=200\n"));

    let mut json_path = report.into_os_string();
    json_path.push(".json");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(json["records"], 1000);
    assert_eq!(json["estimator"], "pml");
    assert!(json["cpt_distance"]["B"].is_f64());
    assert!(json["joint_distance"].is_f64());
}

#[test]
fn omega_cap_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.txt");
    let gold = chain3();
    let args = ["evaluate", "--gold", s(&gold), "--n", "50", "--theta", "0.5", "--seed", "1", "--report", s(&report)];
    let out = binary(&args, &[("PNET_OMEGA_CAP", "4")]);
    assert!(out.status.success());
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("omega_cap=4\n") && text.contains("joint_distance=none\n"), "{text}");

    let out = binary(&args, &[("PNET_OMEGA_CAP", "lots")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PNET_OMEGA_CAP"));
}

#[test]
fn invalid_holdout_exits_2() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.txt");
    let (code, _, err) = run(&[
        "evaluate", "--gold", s(&chain3()), "--n", "50", "--theta", "0.5", "--seed", "1", "--holdout", "1", "--report",
        s(&report),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("holdout"), "{err}");
}

#[test]
fn bad_inputs_exit_2_with_locations() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    let out = dir.path().join("d.csv");
    let sample_bad = || {
        let args = ["sample", "--net", s(&bad), "--n", "5", "--theta", "0.5", "--seed", "1", "--out", s(&out)];
        let output = binary(&args, &[]);
        (output.status.code(), String::from_utf8(output.stderr).unwrap())
    };

    fs::write(&bad, r#"{"variables": [{"name": "X", "states": ["a", "b"]}], "cpts": {"X": [[1.0, 1.2]]}}"#).unwrap();
    let (code, err) = sample_bad();
    assert_eq!(code, Some(2));
    assert!(err.contains("$.cpts.X[0][1]: degree 1.2 out of range [0,1]"), "{err}");

    fs::write(
        &bad,
        r#"{"variables": [{"name": "X", "states": ["a"]}, {"name": "Y", "states": ["b"]}],
            "edges": [["X", "Y"], ["Y", "X"]], "cpts": {"X": [[1.0]], "Y": [[1.0]]}}"#,
    )
    .unwrap();
    let (code, err) = sample_bad();
    assert_eq!(code, Some(2));
    assert!(err.contains("$.edges") && err.contains("cycle"), "{err}");

    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(sample_bad().0, Some(2));

    let missing = dir.path().join("missing.json");
    let (code, _, err) = run(&["score", "--net", s(&missing), "--data", s(&out)]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"), "{err}");

    let data = dir.path().join("data.csv");
    fs::write(&data, "A,B,C\na0,b0,c0\na0|a1,b9,c0\n").unwrap();
    let (code, _, err) = run(&["score", "--net", s(&chain3()), "--data", s(&data)]);
    assert_eq!(code, 2);
    assert!(err.contains("record 2, column B: unknown label \"b9\""), "{err}");

    fs::write(&data, "C,B,A\n").unwrap();
    assert_eq!(run(&["score", "--net", s(&chain3()), "--data", s(&data)]).0, 2);
}

#[test]
fn unwritable_output_exits_1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("no/such/dir/d.csv");
    let (code, _, err) = run(&["sample", "--net", s(&chain3()), "--n", "5", "--theta", "0.5", "--seed", "1", "--out", s(&out)]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot write"), "{err}");
}
