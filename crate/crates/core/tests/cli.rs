use std::path::{Path, PathBuf};

use ci_count::cli::{self, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ci-count").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("golden").join(name)).unwrap()
}

fn assert_golden(args: &[&str], name: &str) {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    assert_eq!(out, golden(name), "{args:?}");
}

#[test]
fn golden_outputs() {
    let cases: &[(&[&str], &str)] = &[
        (&["count", "--n", "2", "--k", "1"], "count_n2_k1.csv"),
        (&["count", "--n", "4", "--k", "2"], "count_n4_k2.csv"),
        (
            &["count", "--n", "3", "--k", "1", "--format", "json"],
            "count_n3_k1.json",
        ),
        (
            &["analyze", "--n", "3", "--truth-table", "01101001"],
            "analyze_n3_parity.json",
        ),
        (&["compare", "--n", "3", "--k", "1"], "compare_n3_k1.csv"),
        (
            &["estimate", "--n", "10", "--k", "2", "--q", "0"],
            "estimate_n10_k2_q0.json",
        ),
        (
            &[
                "estimate", "--n", "12", "--k", "1", "--method", "k1", "--q", "1024", "--mode",
                "exact",
            ],
            "estimate_k1_exact.json",
        ),
        (
            &[
                "oa",
                "export",
                "--n",
                "4",
                "--truth-table",
                "1001011001101001",
            ],
            "oa_export_n4.txt",
        ),
        (
            &["verify", "lemma2", "--n", "2", "--k", "1"],
            "verify_lemma2_n2_k1.json",
        ),
        (
            &["verify", "lemma3", "--n", "2", "--k", "1"],
            "verify_lemma3_n2_k1.json",
        ),
        (
            &["hadamard", "count", "--order", "4"],
            "hadamard_count_4.json",
        ),
        (
            &["hadamard", "identity", "--order", "4"],
            "hadamard_identity_4.json",
        ),
    ];
    for (args, name) in cases {
        assert_golden(args, name);
    }
}

#[test]
fn count_example_rows() {
    let (_, out, _) = run(&["count", "--n", "2", "--k", "1"]);
    let rows: Vec<(u64, u64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    assert_eq!(rows, vec![(0, 1), (1, 2), (2, 1)]);
    assert!(out.starts_with("n,k,q,weight,count\n"));
}

#[test]
fn lemma3_example() {
    let (code, out, _) = run(&["verify", "lemma3", "--n", "2", "--k", "1"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["count"], "4");
    assert_eq!(v["expected"], "4");
}

#[test]
fn degenerate_weight_is_exact() {
    for q in ["0", "4"] {
        let (code, out, err) = run(&["estimate", "--n", "10", "--k", "8", "--q", q]);
        assert_eq!(code, EXIT_OK, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["log2_value"], 0.0);
        assert!(!v["notes"].as_array().unwrap().is_empty());
    }
}

#[test]
fn compare_ratio_column() {
    let (code, out, _) = run(&["compare", "--n", "4", "--k", "1"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("q,exact_count,log2_exact,log2_estimate,ratio,eta")
    );
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let exact: f64 = f[2].parse().unwrap();
        let estimate: f64 = f[3].parse().unwrap();
        let ratio: f64 = f[4].parse().unwrap();
        let expected = (exact - estimate).exp2();
        assert!(
            (ratio - expected).abs() <= 1e-9 * expected.abs().max(1.0),
            "{line}"
        );
        rows += 1;
    }
    assert_eq!(rows, 9);
}

#[test]
fn compare_json_matches_csv() {
    let (_, json, _) = run(&["compare", "--n", "3", "--k", "1", "--format", "json"]);
    let v: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(v.len(), 5);
    assert_eq!(v[1]["exact_count"], 4);
}

#[test]
fn oa_check_exit_codes() {
    let good = fixtures().join("oa_strength3.txt");
    let weak = fixtures().join("oa_weak.txt");
    let (code, out, _) = run(&["oa", "check", good.to_str().unwrap(), "--k", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, _, _) = run(&["oa", "check", weak.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    let (code, _, err) = run(&["oa", "check", "/nonexistent/rows.txt", "--k", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("IoError"));
}

#[test]
fn errors_are_single_line_json() {
    let cases: &[(&[&str], i32, &str)] = &[
        (&["count", "--n", "9", "--k", "1"], EXIT_USAGE, "RangeError"),
        (&["count", "--n", "3"], EXIT_USAGE, "UsageError"),
        (
            &["count", "--n", "5", "--k", "1", "--max-combinations", "10"],
            EXIT_BUDGET,
            "BudgetExceeded",
        ),
        (
            &["analyze", "--n", "2", "--truth-table", "01x1"],
            EXIT_USAGE,
            "ParseError",
        ),
        (
            &["hadamard", "count", "--order", "8"],
            EXIT_BUDGET,
            "CapacityError",
        ),
        (
            &["hadamard", "identity", "--order", "6"],
            EXIT_USAGE,
            "RangeError",
        ),
        (
            &[
                "estimate", "--n", "10", "--k", "2", "--method", "k1", "--q", "1",
            ],
            EXIT_USAGE,
            "RangeError",
        ),
        (
            &["--workers", "0", "count", "--n", "2", "--k", "1"],
            EXIT_USAGE,
            "UsageError",
        ),
        (&["frobnicate"], EXIT_USAGE, "UsageError"),
    ];
    for (args, code, kind) in cases {
        let (got, out, err) = run(args);
        assert_eq!(got, *code, "{args:?}: {err}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], *kind, "{args:?}");
        assert!(v["message"].is_string());
    }
}

#[test]
fn help_and_version() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("census"));
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

fn bin(args: &[&str], env: Option<&str>) -> std::process::Output {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_ci-count"));
    cmd.args(args).env_remove(cli::WORKERS_ENV);
    if let Some(v) = env {
        cmd.env(cli::WORKERS_ENV, v);
    }
    cmd.output().unwrap()
}

#[test]
fn workers_flag_and_env() {
    let args = ["count", "--n", "4", "--k", "1"];
    let default = bin(&args, None);
    let with_env = bin(&args, Some("3"));
    let with_flag = bin(
        &["--workers", "2", "count", "--n", "4", "--k", "1"],
        Some("3"),
    );
    assert!(default.status.success() && with_env.status.success() && with_flag.status.success());
    assert_eq!(default.stdout, with_env.stdout);
    assert_eq!(default.stdout, with_flag.stdout);
    // a bad env value is rejected, a flag overrides it
    let rejected = bin(&args, Some("zero"));
    assert_eq!(rejected.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("RangeError"));
    let overridden = bin(
        &["count", "--workers", "1", "--n", "4", "--k", "1"],
        Some("zero"),
    );
    assert!(overridden.status.success());
    assert_eq!(overridden.stdout, default.stdout);
}

#[test]
fn binary_keeps_stdout_clean() {
    let out = bin(&["count", "--n", "3", "--k", "2"], None);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,k,q,weight,count\n3,2,0,0,1\n3,2,1,4,2\n3,2,2,8,1\n"
    );
    let bad = bin(&["count", "--n", "0", "--k", "1"], None);
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
}

#[test]
fn exported_rows_pass_check_at_their_order() {
    let dir = tempfile::tempdir().unwrap();
    // parity of four inputs: strength 3, not 4
    let (code, rows, _) = run(&["oa", "export", "--n", "4", "--truth-table", "0x6996"]);
    assert_eq!(code, EXIT_OK);
    let path = dir.path().join("rows.txt");
    std::fs::write(&path, &rows).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["oa", "check", p, "--k", "3"]).0, EXIT_OK);
    assert_eq!(run(&["oa", "check", p, "--k", "4"]).0, EXIT_VERIFY_FAILED);
    std::fs::write(&path, "0110\n0110\n").unwrap();
    let (code, _, err) = run(&["oa", "check", p, "--k", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("DuplicateRow"));
}

#[test]
fn long_census_reports_progress_on_stderr() {
    // C(32,16) support sets: long enough for at least one progress line
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        tx.send(bin(
            &[
                "count",
                "--n",
                "5",
                "--k",
                "1",
                "--q",
                "8",
                "--workers",
                "2",
            ],
            None,
        ))
        .unwrap();
    });
    let out = rx
        .recv_timeout(std::time::Duration::from_secs(300))
        .expect("census finished");
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,k,q,weight,count\n5,1,8,16,807980\n"
    );
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("support sets"),
        "no progress on stderr: {err:?}"
    );
}
