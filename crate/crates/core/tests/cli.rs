use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secret-teleport"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn enumerate_prints_exact_probability() {
    let (code, out, _) = run(&["enumerate", "--n", "2", "--m", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("success probability: 3/4"), "{out}");
}

#[test]
fn enumerate_parity_protocol() {
    let (code, out, _) = run(&[
        "enumerate",
        "--n",
        "2",
        "--p",
        "2",
        "--eta",
        "0.1",
        "--mode",
        "exact",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("Success: 0.630754036875"), "{out}");
}

#[test]
fn teleport_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let (code, out, err) = run(&[
        "teleport",
        "--n",
        "2",
        "--m",
        "2",
        "--alpha-re",
        "1",
        "--beta-re",
        "0",
        "--trials",
        "1000",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("mean 1.000000000000"), "{out}");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1000);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if let Some(f) = v["fidelity"].as_f64() {
            assert!((f - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn cbm_rates_match_the_printed_oracle() {
    let (code, out, _) = run(&[
        "cbm", "--n", "2", "--p", "2", "--eta", "0.1", "--trials", "100000", "--seed", "1",
    ]);
    assert_eq!(code, 0);
    let grab = |prefix: &str| -> f64 {
        let line = out
            .lines()
            .find(|l| l.trim_start().starts_with(prefix))
            .unwrap();
        line.split(':')
            .nth(1)
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let (rate, exact) = (grab("success:"), grab("Success:"));
    let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
    assert!((rate - exact).abs() <= 3.0 * sigma, "{out}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "[run]\nseed = 4\ntrials = 500\ncsv = true\n\n[protocol]\nn = [1, 2]\np = 2\n\n[noise]\neta = [0.0, 0.2]\n",
    )
    .unwrap();
    let (code, out, err) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "300",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("n,p,q,eta,f,epsilon,adversary,trials"));
    assert!(lines[1..].iter().all(|l| l.contains(",300,")));
}

#[test]
fn pipeline_reports_above_classical_bound() {
    let (code, out, _) = run(&["fidelity-pipeline"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("(above 2/3)").count(), 3, "{out}");
}

#[test]
fn bad_input_is_rejected() {
    assert_ne!(run(&["teleport", "--frobnicate"]).0, 0);
    let (code, _, err) = run(&["cbm", "--n", "2", "--p", "2", "--trials", "10"]);
    assert_ne!(code, 0);
    assert!(err.contains("--seed"), "{err}");
    assert_ne!(run(&["teleport", "--seed", "1", "--f", "2"]).0, 0);
    assert_ne!(run(&["cbm", "--seed", "1", "--p", "2", "--q", "2"]).0, 0);
    assert_ne!(
        run(&["teleport", "--seed", "1", "--out", "/proc/nope/x"]).0,
        0
    );
}
