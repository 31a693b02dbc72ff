use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcqp_hull::generators::{self, FamilySpec};
use qcqp_hull_cli::files::{CertificateFile, HullFile, ProblemFile};

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("qcqp-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn qcqp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcqp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn generate_example1(dir: &Path) -> String {
    let path = dir.join("example1.json");
    let o = qcqp(&["generate", "example1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn problem_files_round_trip_on_generator_outputs() {
    let specs = [
        FamilySpec::Example1,
        FamilySpec::Gtrs { n: 4, seed: 9 },
        FamilySpec::QuadraticMatrixProgram { n: 2, k: 3, m: 2, seed: 4 },
        FamilySpec::SwissCheese { n: 3, inside: 2, outside: 1, linear: 1, seed: 5 },
        FamilySpec::Barvinok { forms: generators::random_diagonal_forms(3, 2, 6) },
    ];
    for s in &specs {
        let p = generators::generate(s).unwrap();
        let file = ProblemFile::from_problem(&p);
        let text = serde_json::to_string(&file).unwrap();
        let back: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_problem().unwrap(), p, "{s:?}");
    }
}

#[test]
fn analyze_example1_reports_guarantee() {
    let dir = workdir("analyze");
    let problem = generate_example1(&dir);
    let o = qcqp(&["analyze", &problem]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("assumption1: pass"), "{text}");
    assert!(text.contains("corollary2: pass"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("hull_guaranteed: true") && l.contains("corollary2")), "{text}");
}

#[test]
fn hull_example1_has_three_constraints() {
    let dir = workdir("hull");
    let problem = generate_example1(&dir);
    let out = dir.join("hull.json");
    let o = qcqp(&["hull", &problem, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let h: HullFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(h.epigraph.len() + h.homogeneous.len(), 3);
}

#[test]
fn decompose_writes_a_verifiable_certificate() {
    let dir = workdir("decompose");
    let problem = generate_example1(&dir);
    let cert = dir.join("cert.json");
    let o = qcqp(&["decompose", &problem, "--point", "4,2", "--t", "33.5", "--out", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c: CertificateFile = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c.points.len(), 2);
    assert_eq!(c.point.x, vec![4.0, 2.0]);
    assert_eq!(c.tol, 1e-8);
    let v = qcqp(&["verify", &problem, cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));

    // a tampered weight must be rejected
    let mut bad = c.clone();
    bad.weights[0] += 1e-3;
    bad.weights[1] -= 1e-3;
    let bad_path = dir.join("bad.json");
    fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let v = qcqp(&["verify", &problem, bad_path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(5));
}

#[test]
fn decompose_outside_the_relaxation_writes_nothing() {
    let dir = workdir("outside");
    let problem = generate_example1(&dir);
    let cert = dir.join("cert.json");
    let o = qcqp(&["decompose", &problem, "--point", "4,2", "--t", "30", "--out", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(!cert.exists());
}

#[test]
fn solve_reports_the_example_optimum() {
    let dir = workdir("solve");
    let problem = generate_example1(&dir);
    let o = qcqp(&["solve", &problem, "--box", "-10,10", "--grid", "101"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() + 17.5).abs() < 1e-5);
    assert!((v["brute_force"]["value"].as_f64().unwrap() + 17.5).abs() < 1e-3);
}

#[test]
fn plot_matches_hand_values_and_orders_hull_below_epigraph() {
    let dir = workdir("plot");
    let problem = generate_example1(&dir);
    let o = qcqp(&["plot", &problem, "--box", "-4,4", "--box", "-2,2", "--resolution", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,tmin_d,tmin_hull"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 25);
    let num = |s: &str| if s == "inf" { f64::INFINITY } else { s.parse::<f64>().unwrap() };
    for r in &rows {
        let (x1, x2, d, h) = (num(&r[0]), num(&r[1]), num(&r[2]), num(&r[3]));
        assert!(h <= d + 1e-8, "{r:?}");
        if x1 == 0.0 && x2 == 0.0 {
            assert_eq!((d, h), (0.0, 0.0));
        }
        if x1 == 4.0 && x2 == 2.0 {
            assert!(d.is_infinite());
            assert!((h - 33.5).abs() < 1e-9);
        }
    }
}

#[test]
fn plot_rejects_other_dimensions() {
    let dir = workdir("plot3");
    let path = dir.join("g.json");
    assert_eq!(qcqp(&["generate", "gtrs", "--n", "3", "--out", path.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(qcqp(&["plot", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = workdir("codes");
    assert_eq!(qcqp(&["frobnicate"]).status.code(), Some(1));
    let junk = dir.join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(qcqp(&["analyze", junk.to_str().unwrap()]).status.code(), Some(2));
    let wrong = dir.join("wrong.json");
    fs::write(&wrong, r#"{"n":1,"mi":1,"me":0,"quadratics":[{"A":[[1]],"b":[0],"c":0}]}"#).unwrap();
    assert_eq!(qcqp(&["analyze", wrong.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn missing_dual_interior_is_an_assumption_failure() {
    let dir = workdir("assumption");
    // min −x² s.t. x = 0: A(γ) = −1 + 0·γ is never positive definite
    let path = dir.join("p.json");
    fs::write(&path, r#"{"n":1,"mi":0,"me":1,"quadratics":[{"A":[[-1]],"b":[0],"c":0},{"A":[[0]],"b":[0.5],"c":0}]}"#)
        .unwrap();
    let o = qcqp(&["hull", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("assumption 1"));
    let a = qcqp(&["analyze", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).contains("assumption1: fail"));
}

#[test]
fn generate_is_deterministic_in_the_seed() {
    let a = qcqp(&["generate", "qmp", "--seed", "11"]);
    let b = qcqp(&["generate", "qmp", "--seed", "11"]);
    let c = qcqp(&["generate", "qmp", "--seed", "12"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
}
