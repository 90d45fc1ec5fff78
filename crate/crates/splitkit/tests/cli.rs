//! End-to-end tests of the `splitkit` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splitkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("splitkit-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gen_class1(dir: &Path, n: usize) -> (PathBuf, PathBuf) {
    let m = dir.join("m.txt");
    let r = dir.join("m.rhs");
    let out = run(&[
        "gen",
        "--class",
        "1",
        "--n",
        &n.to_string(),
        "--phi",
        "0.9",
        "--seed",
        "7",
        "--out",
        m.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    (m, r)
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["solve", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_writes_matrix_and_rhs_with_known_solution() {
    let dir = tmpdir("gen");
    let (m, r) = gen_class1(&dir, 12);
    let a = splitkit::linalg::read_matrix(&m).unwrap();
    let b = splitkit::linalg::read_vector(&r).unwrap();
    assert_eq!(a.rows(), 12);
    let ones = vec![1.0; 12];
    let ab = a.matvec(&ones);
    for (x, y) in ab.iter().zip(b.as_slice()) {
        assert_eq!(x, y);
    }
}

#[test]
fn solve_converges_and_reports_exit_codes() {
    let dir = tmpdir("solve");
    let (m, r) = gen_class1(&dir, 20);
    let sol = dir.join("x.txt");
    let out = run(&[
        "solve",
        "--matrix",
        m.to_str().unwrap(),
        "--rhs",
        r.to_str().unwrap(),
        "--method",
        "SGS",
        "--tol",
        "1e-10",
        "--out",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("converged=true"));
    assert!(text.contains("iterations="));
    let x = splitkit::linalg::read_vector(&sol).unwrap();
    for i in 0..20 {
        assert!((x[i] - 1.0).abs() < 1e-8);
    }

    // The banded system diverges under the plain fixed-point method.
    let bm = dir.join("bsp.txt");
    let out = run(&[
        "gen",
        "--class",
        "bspline",
        "--n",
        "100",
        "--out",
        bm.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "solve",
        "--matrix",
        bm.to_str().unwrap(),
        "--rhs",
        dir.join("bsp.rhs").to_str().unwrap(),
        "--method",
        "jacobi",
        "--out",
        dir.join("xb.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn solve_accepts_two_step_and_modified_sgs_modes() {
    let dir = tmpdir("modes");
    let (m, r) = gen_class1(&dir, 16);
    for (mode, method) in [("two-step", "FTC"), ("modified-sgs", "SGS")] {
        let sol = dir.join(format!("x-{mode}.txt"));
        let out = run(&[
            "solve",
            "--matrix",
            m.to_str().unwrap(),
            "--rhs",
            r.to_str().unwrap(),
            "--method",
            method,
            "--mode",
            mode,
            "--out",
            sol.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "mode {mode}");
        let x = splitkit::linalg::read_vector(&sol).unwrap();
        for i in 0..16 {
            assert!((x[i] - 1.0).abs() < 1e-8, "mode {mode} entry {i}");
        }
    }
}

#[test]
fn solve_accepts_a_splitting_description_file() {
    let dir = tmpdir("splitfile");
    let (m, r) = gen_class1(&dir, 5);
    // Claim the strict upper triangle as part 1 and the strict lower as
    // part 2 (the two-triangle method).
    let mut upper = String::new();
    let mut lower = String::new();
    for i in 1..=5 {
        for j in 1..=5 {
            if i < j {
                upper.push_str(&format!("{i} {j} "));
            }
            if i > j {
                lower.push_str(&format!("{i} {j} "));
            }
        }
    }
    let split = dir.join("tu.split");
    std::fs::write(&split, format!("2 5\n{upper}\n{lower}\n")).unwrap();
    let out = run(&[
        "solve",
        "--matrix",
        m.to_str().unwrap(),
        "--rhs",
        r.to_str().unwrap(),
        "--method",
        split.to_str().unwrap(),
        "--out",
        dir.join("x.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn spectra_emits_csv_and_json() {
    let dir = tmpdir("spectra");
    let (m, _) = gen_class1(&dir, 10);
    let out = run(&[
        "spectra",
        "--matrix",
        m.to_str().unwrap(),
        "--method",
        "jacobi,tu,sgs",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("method,rho,backend,iters,converged"));
    assert_eq!(text.lines().count(), 4);

    let out = run(&[
        "spectra",
        "--matrix",
        m.to_str().unwrap(),
        "--method",
        "tu",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed[0]["method"], "TU");
    assert!(parsed[0]["rho"].as_f64().unwrap() > 0.0);
}

#[test]
fn order_reports_refinement_and_optimality() {
    let dir = tmpdir("order");
    let (m, _) = gen_class1(&dir, 8);
    let out = run(&[
        "order",
        "--matrix",
        m.to_str().unwrap(),
        "--a",
        "TU",
        "--b",
        "jacobi",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("TU > Jacobi"), "got: {text}");
    assert!(text.contains("witness r="));

    let out = run(&[
        "order",
        "--matrix",
        m.to_str().unwrap(),
        "--a",
        "AFTC_L",
        "--b",
        "AFTC_L",
    ]);
    assert!(stdout(&out).contains("not comparable"));

    let out = run(&[
        "order",
        "--matrix",
        m.to_str().unwrap(),
        "--a",
        "AFTC_L_compact",
    ]);
    let text = stdout(&out);
    assert!(text.contains("essential=true"));
    assert!(text.contains("maximal=true"));
    assert!(text.contains("potentially_optimal=true"));

    // A multi-order gap goes through the telescoping chain.
    let out = run(&[
        "order",
        "--matrix",
        m.to_str().unwrap(),
        "--a",
        "FLTC",
        "--b",
        "TL",
    ]);
    let text = stdout(&out);
    assert!(text.contains("FLTC > TL"), "got: {text}");
}

#[test]
fn bench_report_is_deterministic() {
    let dir = tmpdir("bench");
    let report1 = dir.join("r1.csv");
    let report2 = dir.join("r2.csv");
    for path in [&report1, &report2] {
        let out = run(&[
            "bench",
            "--class",
            "2",
            "--n",
            "12",
            "--phi",
            "0.9",
            "--trials",
            "3",
            "--seed",
            "5",
            "--methods",
            "jacobi,tu,sgs",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&report1).unwrap();
    let b = std::fs::read(&report2).unwrap();
    assert_eq!(a, b, "report bytes differ between identical runs");
}

#[test]
fn reproduce_bspline_passes() {
    let out = run(&["reproduce", "bspline"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("bspline: PASS"));
    assert!(!text.contains("FAIL"));
}
