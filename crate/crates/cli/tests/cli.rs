//! End-to-end runs of the `polywell` binary. Reports are compared byte for byte with
//! files in `tests/golden`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polywell_core::format::ProblemFile;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_polywell"));
    cmd.current_dir(data_dir()).args(args).env_remove("POLYWELL_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn golden(name: &str, args: &[&str], code: i32) {
    let out = run(args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        out.status.code(),
        Some(code),
        "{name}: stdout {stdout}\nstderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &stdout).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stdout, expected, "{name} differs from its golden file");
}

#[test]
fn check_reports() {
    golden("check_ill_posed", &["check", "first_coordinate.toml"], 2);
    golden("check_well_posed", &["check", "first_coordinate_sum.toml"], 0);
    golden("check_hypothesis", &["check", "flat_domain.toml"], 3);
}

#[test]
fn diagnose_report() {
    golden("diagnose_l1_r3", &["diagnose", "l1_r3.toml"], 0);
}

#[test]
fn solve_reports() {
    golden("solve_soft_3", &["solve", "soft_threshold.toml", "--b", "3"], 0);
    golden("solve_soft_half", &["solve", "soft_threshold.toml", "--b", "1/2", "--exact"], 0);
    golden("solve_soft_neg", &["solve", "soft_threshold.toml", "--b", "-3"], 0);
    golden("solve_non_unique", &["solve", "first_coordinate.toml", "--b", "2"], 0);
}

#[test]
fn tv_reports() {
    golden("tv_triangle", &["tv", "triangle.txt", "--vertices"], 0);
    golden("tv_path_nn", &["tv", "path3.txt", "--nn"], 0);
    golden("tv_ct3", &["tv", "--ct", "3"], 0);
    golden("tv_ct3_figure_z", &["tv", "--ct", "3", "--z", "-1,2,-2,-1,2,-2"], 0);
}

#[test]
fn montecarlo_report() {
    golden("montecarlo_l1", &["montecarlo", "l1_f3.toml", "--m", "3", "--trials", "20", "--seed", "1"], 0);
    let out = run(&["montecarlo", "l1_f3.toml", "--m", "0", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numeric_solve_matches_exact() {
    let out = run(&["solve", "soft_threshold.toml", "--b", "-3", "--numeric"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("minimizer:")).unwrap();
    let v: f64 = line.trim_start_matches("minimizer: (").trim_end_matches(')').parse().unwrap();
    assert!((v + 2.0).abs() < 1e-6, "{v}");
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(run(&["check", "bad_rational.toml"]).status.code(), Some(1));
    let out = run(&["check", "bad_rational.toml"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(run(&["check"]).status.code(), Some(1));
    assert_eq!(run(&["check", "missing.toml"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "soft_threshold.toml", "--b", "1,2"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "soft_threshold.toml", "--b", "x"]).status.code(), Some(1));
    assert_eq!(run(&["tv", "--vertices"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_four() {
    let out = run_env(&["diagnose", "l1_r3.toml"], &[("POLYWELL_BUDGET", "faces=3")]);
    assert_eq!(out.status.code(), Some(4));
    let out = run_env(&["tv", "triangle.txt", "--vertices"], &[("POLYWELL_BUDGET", "orientations=4")]);
    assert_eq!(out.status.code(), Some(4));
    let out = run_env(&["check", "l1_r3.toml"], &[("POLYWELL_BUDGET", "bogus")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic_and_mirrored_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let a = run(&["--emit-json", json.to_str().unwrap(), "check", "first_coordinate.toml"]);
    let b = run(&["check", "first_coordinate.toml"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["format"], "polywell-report v1");
    assert_eq!(v["status"], "ill-posed");
    assert_eq!(v["certificate.y"], "(1, 1)");
    assert_eq!(v["rank"], 1);
}

fn reduce_to(args: &[&str], dir: &Path) -> (String, ProblemFile) {
    let out_path = dir.join("reduced.toml");
    let mut full: Vec<&str> = vec!["reduce"];
    full.extend_from_slice(args);
    let p = out_path.to_str().unwrap().to_string();
    full.push("-o");
    full.push(&p);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    let parsed = ProblemFile::parse(&text).unwrap();
    (String::from_utf8(out.stdout).unwrap(), parsed)
}

#[test]
fn reductions_emit_checkable_files() {
    let dir = tempfile::tempdir().unwrap();
    for (weights, ill) in [("1,2,3", true), ("1,1,1", false), ("2,2", true)] {
        for extra in [&[][..], &["--tv"][..], &["--tv", "--nonneg"][..]] {
            let mut args = vec!["--partition", weights];
            args.extend_from_slice(extra);
            let (report, _) = reduce_to(&args, dir.path());
            assert!(report.contains("agree: true"), "{report}");
            assert!(report.contains(&format!("partition-exists: {ill}")));
            let check = run(&["check", dir.path().join("reduced.toml").to_str().unwrap()]);
            assert_eq!(check.status.code(), Some(if ill { 2 } else { 0 }));
        }
    }
    let (report, pf) = reduce_to(&["--l0", "l0_sum.toml"], dir.path());
    assert!(report.contains("l0-minimum: 1") && report.contains("agree: true"), "{report}");
    assert_eq!(pf.instance.nullity_a(), 1);
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "version = 1\nB = [[\"1\", \"1\"], [\"2\", \"2\"]]\ny = [\"1\", \"0\"]\n").unwrap();
    let out = run(&["reduce", "--l0", bad.to_str().unwrap(), "-o", dir.path().join("x.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn montecarlo_persists_ill_posed_samples() {
    // For f = 0 the only subdifferential is {0}, which every row space meets, so with
    // m < n every sample is ill-posed.
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.toml");
    fs::write(
        &file,
        "version = 1\nA = []\nn = 2\n\n[[regularizer]]\nkind = \"max_affine\"\npieces = [{ v = [\"0\", \"0\"], w = \"0\" }]\n",
    )
    .unwrap();
    let replay = dir.path().join("replay.toml");
    let out = run(&[
        "montecarlo",
        file.to_str().unwrap(),
        "--m",
        "1",
        "--trials",
        "3",
        "--seed",
        "5",
        "--replay",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ill-posed: 3"), "{text}");
    let saved = fs::read_to_string(&replay).unwrap();
    assert_eq!(saved.matches("[[sample]]").count(), 3);
}
