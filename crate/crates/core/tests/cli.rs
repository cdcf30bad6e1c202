use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use pmm_viterbi::cli::{EXIT_DIAGNOSTIC, EXIT_GUARD, EXIT_OK, EXIT_USAGE};
use pmm_viterbi::io::read_observations_csv;
use pmm_viterbi::{canonical, viterbi_path, Scorer, TieRule};

fn pmm(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pmm"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn pmm");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn simulate_to(dir: &Path, steps: &str, seed: &str) -> String {
    let path = dir.join("traj.csv");
    let out = pmm(
        &["simulate", "--model", "builtin:two_state_pmm", "--steps", steps, "--seed", seed, "--out", path.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), EXIT_OK, "{}", text(&out.stderr));
    path.to_str().unwrap().to_owned()
}

#[test]
fn simulate_is_reproducible_and_has_the_documented_header() {
    let a = pmm(&["simulate", "--model", "builtin:example_1_1", "--steps", "50", "--seed", "3"], None);
    let b = pmm(&["simulate", "--model", "builtin:example_1_1", "--steps", "50", "--seed", "3"], None);
    assert_eq!(code(&a), EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let csv = text(&a.stdout);
    assert!(csv.starts_with("t,x,y\n"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn offline_decode_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let traj = simulate_to(dir.path(), "200", "8");
    let out = pmm(&["decode", "--model", "builtin:two_state_pmm", "--obs", &traj], None);
    assert_eq!(code(&out), EXIT_OK, "{}", text(&out.stderr));
    let model = canonical::two_state_pmm();
    let obs = read_observations_csv(std::fs::File::open(&traj).unwrap(), model.observation_space()).unwrap();
    let expected = viterbi_path(&model, &obs, &TieRule::Lexicographic).unwrap();
    let decoded: Vec<usize> = text(&out.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap() - 1)
        .collect();
    assert_eq!(decoded, expected.path);
    let diag: serde_json::Value = serde_json::from_str(text(&out.stderr).trim()).unwrap();
    assert!((diag["log_likelihood"].as_f64().unwrap() - expected.log_likelihood()).abs() < 1e-9);
}

#[test]
fn online_decode_reads_standard_input_and_agrees_with_offline() {
    let dir = tempfile::tempdir().unwrap();
    let traj = std::fs::read(simulate_to(dir.path(), "300", "4")).unwrap();
    let online = pmm(&["decode", "--model", "builtin:two_state_pmm", "--online", "--order", "1"], Some(&traj));
    let offline = pmm(&["decode", "--model", "builtin:two_state_pmm", "--obs", "-"], Some(&traj));
    assert_eq!(code(&online), EXIT_OK, "{}", text(&online.stderr));
    assert_eq!(text(&online.stdout).lines().count(), 301);
    let diag: serde_json::Value = serde_json::from_str(text(&online.stderr).trim()).unwrap();
    assert!(diag["diagnostics"]["commits"].as_u64().unwrap() > 0);
    // ties may be broken differently, the likelihood may not
    let model = canonical::two_state_pmm();
    let obs = read_observations_csv(&traj[..], model.observation_space()).unwrap();
    let score = |o: &Output| {
        let path: Vec<usize> = text(&o.stdout)
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap() - 1)
            .collect();
        pmm_viterbi::Weight::ln(&pmm_viterbi::dp::path_score(&model, &obs, &path, true))
    };
    assert!((score(&online) - score(&offline)).abs() < 1e-9);
}

#[test]
fn zero_likelihood_decode_exits_with_the_diagnostic_code() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("identity.json");
    std::fs::write(
        &model,
        r#"{"type":"hmm","transitions":[["1","0"],["0","1"]],
            "emissions":[["1","0"],["0","1"]],
            "initial_hidden":["0.5","0.5"]}"#,
    )
    .unwrap();
    let out = pmm(&["decode", "--model", model.to_str().unwrap()], Some(b"t,x\n1,1\n2,2\n"));
    assert_eq!(code(&out), EXIT_DIAGNOSTIC, "{}", text(&out.stderr));
}

#[test]
fn missing_model_is_a_usage_error_naming_the_file() {
    let out = pmm(&["decode", "--model", "/nonexistent/model.json"], Some(b"t,x\n1,1\n"));
    assert_eq!(code(&out), EXIT_USAGE);
    assert!(text(&out.stderr).contains("/nonexistent/model.json"));
    let out = pmm(&["decode", "--model", "builtin:no_such_model"], Some(b"t,x\n1,1\n"));
    assert_eq!(code(&out), EXIT_USAGE);
    let out = pmm(&["frobnicate"], None);
    assert_eq!(code(&out), EXIT_USAGE);
}

#[test]
fn guard_violations_exit_with_code_three() {
    let out = pmm(&["check", "--model", "builtin:two_state_pmm", "--which", "discrete", "--depth", "9"], None);
    assert_eq!(code(&out), EXIT_GUARD);
    assert!(text(&out.stderr).contains("limit 6"));
}

#[test]
fn check_reports_json_and_strict_exit_flags_failures() {
    let out = pmm(&["check", "--model", "builtin:glm_scalar", "--which", "glm", "--strict-exit"], None);
    assert_eq!(code(&out), EXIT_OK, "{}", text(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["glm"]["overall"], true);
    let out = pmm(&["check", "--model", "builtin:example_1_1_hmm", "--which", "hmm", "--strict-exit"], None);
    assert_eq!(code(&out), EXIT_DIAGNOSTIC);
    let out = pmm(&["check", "--model", "builtin:example_1_1_hmm", "--which", "hmm"], None);
    assert_eq!(code(&out), EXIT_OK);
}

#[test]
fn barrier_certifies_and_survives_falsification() {
    let block = vec!["1"; 19].join(",");
    let out = pmm(&["barrier", "--model", "builtin:two_state_pmm", "--block", &block, "--falsify", "200"], None);
    assert_eq!(code(&out), EXIT_OK, "{}", text(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["falsify"]["outcome"], "none_found");
    assert_eq!(rep["prop21"]["order"], 17);
    let short = pmm(&["barrier", "--model", "builtin:two_state_pmm", "--block", "1,1,1"], None);
    assert_eq!(code(&short), EXIT_DIAGNOSTIC);
}

#[test]
fn experiment_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = pmm(
            &["experiment", "--name", "barrier-growth", "--seed", "2", "--steps", "1000", "--out", p.to_str().unwrap()],
            None,
        );
        assert_eq!(code(&out), EXIT_OK, "{}", text(&out.stderr));
    }
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv, std::fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("n,committed,commits,commits_state_1,nodes_seen,buffer_high_water\n"));
    let out = pmm(&["experiment", "--name", "nope"], None);
    assert_eq!(code(&out), EXIT_USAGE);
}
