use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn evoscheme(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evoscheme"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EVOSCHEME_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn residual_sum(csv: &str) -> f64 {
    let last = csv.lines().last().expect("non-empty audit");
    assert!(last.starts_with("sum,"), "{last}");
    last.rsplit(',').next().unwrap().parse().unwrap()
}

const SMALL_RK: [&str; 12] = [
    "--stage",
    "2",
    "--order",
    "2",
    "--runs",
    "2",
    "--population-size",
    "20",
    "--max-generations",
    "30",
    "--stall-generations",
    "30",
];

#[test]
fn audit_builtin_tableau() {
    let dir = tempfile::tempdir().unwrap();
    let o = evoscheme(&["audit", "builtin:evolved6", "--order", "5"], dir.path());
    assert!(o.status.success());
    let sum = residual_sum(&stdout(&o));
    assert!((sum - 3.038e-14).abs() < 1e-15, "{sum}");
}

#[test]
fn audit_zero_tableau_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    fs::write(
        &path,
        r#"{"kind": "tableau", "stage": 2, "genome": [0, 0, 0]}"#,
    )
    .unwrap();
    let out = dir.path().join("audit.csv");
    let o = evoscheme(
        &[
            "audit",
            path.to_str().unwrap(),
            "--order",
            "2",
            "--output",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(residual_sum(&stdout(&o)), 1.5);
    assert_eq!(fs::read_to_string(out).unwrap(), stdout(&o));
}

#[test]
fn audit_stencil_moments() {
    let dir = tempfile::tempdir().unwrap();
    let o = evoscheme(&["audit", "builtin:central-4", "--order", "4"], dir.path());
    assert!(o.status.success());
    assert!(residual_sum(&stdout(&o)) < 1e-12);
}

#[test]
fn bad_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "population_size = 150\nmutation = 3\n").unwrap();
    let cases: [&[&str]; 4] = [
        &["evolve", "rk", "--stage", "5", "--order", "5"],
        &["evolve", "fd", "--config", cfg.to_str().unwrap()],
        &["audit", "missing.json", "--order", "2"],
        &["evolve", "fd", "--population-size", "3"],
    ];
    for args in cases {
        let o = evoscheme(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = evoscheme(
        &["evolve", "fd", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(evoscheme(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn evolve_is_reproducible_and_audit_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let mut args = vec!["evolve", "rk"];
        args.extend(SMALL_RK);
        args.extend(["--out", out.to_str().unwrap()]);
        let o = evoscheme(&args, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in [
        "runs.csv",
        "coefficients.csv",
        "residuals.csv",
        "box.csv",
        "runs/run-000.csv",
        "runs/run-001.csv",
        "winner.json",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let o = evoscheme(
        &[
            "audit",
            a.join("winner.json").to_str().unwrap(),
            "--order",
            "2",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        fs::read_to_string(a.join("residuals.csv")).unwrap()
    );
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("root");
    let mut args = vec!["evolve", "rk"];
    args.extend(SMALL_RK);
    let o = Command::new(env!("CARGO_BIN_EXE_evoscheme"))
        .args(&args)
        .current_dir(dir.path())
        .env("EVOSCHEME_OUT", &root)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(root.join("evolve-rk-s2-p2-seed0/winner.json").is_file());
}

#[test]
fn validate_writes_sweep_and_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = evoscheme(
        &[
            "validate",
            "builtin:rk4",
            "builtin:evolved6",
            "--reference",
            "ivp",
            "--out",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 11);
    let est: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("estimates.json")).unwrap()).unwrap();
    assert_eq!(est.as_array().map(Vec::len), Some(2));
    assert!(stdout(&o).contains("rk4: slope 3.9"));
}

#[test]
fn stencil_against_ivp_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = evoscheme(
        &["validate", "builtin:central-2", "--reference", "ivp"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
}
