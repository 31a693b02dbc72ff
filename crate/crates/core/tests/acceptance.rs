//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DVector;
use qcqp_hull::certify::{self, Verdict};
use qcqp_hull::gamma::{dd_vrep, DualModel, FaceClass};
use qcqp_hull::generators::{self, example1};
use qcqp_hull::hull::{self, decompose, dsdp_membership, soc_description, verify_certificate};
use qcqp_hull::linalg;
use qcqp_hull::solve::{brute_force, minimize_soc, Bounds};
use qcqp_hull::{EpigraphPoint, Qcqp};
use rand::RngExt;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn within(elapsed: Duration, limit_ms: u128) -> Result<(), String> {
    ensure(elapsed.as_millis() < limit_ms, || format!("took {elapsed:?}, limit {limit_ms} ms"))
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let p = example1();
    let model = DualModel::new(&p).map_err(|e| e.to_string())?;
    let v = dd_vrep(&model.gamma.h).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expect = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    ensure(v.vertices.len() == 3, || format!("{} vertices", v.vertices.len()))?;
    for e in expect {
        ensure(v.vertices.iter().any(|g| close(g[0], e[0], 1e-9) && close(g[1], e[1], 1e-9)), || {
            format!("vertex {e:?} missing from {:?}", v.vertices)
        })?;
    }
    let s = 0.5f64.sqrt();
    ensure(v.rays.len() == 1 && close(v.rays[0][0], s, 1e-9) && close(v.rays[0][1], s, 1e-9), || {
        format!("rays {:?}", v.rays)
    })?;
    within(elapsed, 100)?;
    Ok(format!("3 vertices, ray (1,1)/√2, {elapsed:?}"))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let p = example1();
    let model = DualModel::new(&p).map_err(|e| e.to_string())?;
    let d = soc_description(&model.gamma.v, &p).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(d.epigraph.len() == 3 && d.homogeneous.is_empty(), || {
        format!("{} epigraph / {} homogeneous constraints", d.epigraph.len(), d.homogeneous.len())
    })?;
    // x₁²+x₂²+10x₁, 2x₁²+10x₁−5, 2x₂²+10x₁−50
    let expect = [([1.0, 1.0], -0.0), ([2.0, 0.0], -5.0), ([0.0, 2.0], -50.0)];
    for (diag, c) in expect {
        let found = d.epigraph.iter().any(|g| {
            let a = g.a();
            close(a[(0, 0)], diag[0], 1e-12)
                && close(a[(1, 1)], diag[1], 1e-12)
                && close(a[(0, 1)], 0.0, 1e-12)
                && close(g.b()[0], 5.0, 1e-12)
                && close(g.b()[1], 0.0, 1e-12)
                && close(g.c(), c, 1e-12)
        });
        ensure(found, || format!("constraint diag {diag:?}, c {c} missing"))?;
    }
    within(elapsed, 100)?;
    Ok(format!("3 constraints, ray constant dropped, {elapsed:?}"))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let p = example1();
    let model = DualModel::new(&p).map_err(|e| e.to_string())?;
    let d = soc_description(&model.gamma.v, &p).map_err(|e| e.to_string())?;
    let bounds = Bounds::cube(2, -10.0, 10.0).map_err(|e| e.to_string())?;
    let relaxed = minimize_soc(&d, &bounds, 1e-10).map_err(|e| e.to_string())?;
    let brute = brute_force(&p, &bounds, 400, 0).map_err(|e| e.to_string())?;
    // the relaxed minimizer set is a segment; decomposing it lands on the QCQP minimizers
    let rounded = decompose(&p, &model, &EpigraphPoint::new(relaxed.minimizer.clone(), relaxed.value / 2.0), 1e-9)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r = 1.25f64.sqrt();
    ensure(close(relaxed.value, -17.5, 1e-5), || format!("relaxed value {}", relaxed.value))?;
    ensure(close(brute.value, relaxed.value, 1e-3), || format!("brute force {} vs {}", brute.value, relaxed.value))?;
    ensure(close(brute.x[0], -2.5, 1e-4) && close(brute.x[1].abs(), r, 1e-4), || {
        format!("brute-force minimizer {:?}", brute.x.as_slice())
    })?;
    ensure(close(relaxed.minimizer[0], -2.5, 1e-4), || format!("relaxed minimizer {:?}", relaxed.minimizer.as_slice()))?;
    for pt in &rounded.points {
        ensure(close(pt.x[0], -2.5, 1e-4) && close(pt.x[1].abs(), r, 1e-4), || {
            format!("decomposed minimizer {:?}", pt.x.as_slice())
        })?;
    }
    within(elapsed, 5000)?;
    Ok(format!(
        "relaxed {:.9}, brute force {:.9} at ({:.6}, {:.6}), {} Kelley iterations, {elapsed:?}",
        relaxed.value, brute.value, brute.x[0], brute.x[1], relaxed.iterations
    ))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let p = example1();
    let model = DualModel::new(&p).map_err(|e| e.to_string())?;
    let target = EpigraphPoint::from_slice(&[4.0, 2.0], 33.5);
    let c = decompose(&p, &model, &target, 1e-9).map_err(|e| e.to_string())?;
    let ok = verify_certificate(&p, &c, &target, 1e-8);
    let elapsed = start.elapsed();
    let r = 11f64.sqrt();
    let expect = [(r, (2.0 + r) / (2.0 * r)), (-r, (r - 2.0) / (2.0 * r))];
    ensure(c.points.len() == 2, || format!("{} points", c.points.len()))?;
    for (x2, w) in expect {
        let hit = c.points.iter().zip(&c.weights).any(|(pt, wt)| {
            close(pt.x[0], 4.0, 1e-8) && close(pt.x[1], x2, 1e-8) && close(pt.t, 33.5, 1e-8) && close(*wt, w, 1e-8)
        });
        ensure(hit, || format!("point (4, {x2}) with weight {w} missing"))?;
    }
    ensure(ok, || "certificate does not verify".into())?;
    within(elapsed, 100)?;
    Ok(format!("weights {:.10} / {:.10}, verified, {elapsed:?}", c.weights[0], c.weights[1]))
}

/// Child faces along the recursion strictly grow in affine dimension.
fn faces_grow(c: &hull::ConvexCombination) -> bool {
    c.trace.iter().all(|s| s.parent.is_none_or(|par| s.aff_dim > c.trace[par].aff_dim))
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(5);
    let mut certs = 0;
    let mut max_depth = 0;
    for i in 0..50u64 {
        let n = 2 + (i as usize % 5);
        let p = generators::gtrs(n, 1000 + i).map_err(|e| e.to_string())?;
        let a = certify::analyze(&p, None).map_err(|e| e.to_string())?;
        ensure(a.report.corollary_m1 == Verdict::Pass, || format!("instance {i}: single-constraint condition fails"))?;
        let model = a.model.ok_or("no dual model")?;
        let d = soc_description(&model.gamma.v, &p).map_err(|e| e.to_string())?;
        for pt in common::sample_dsdp(&d, 3.0, 100, &mut rng) {
            let c = decompose(&p, &model, &pt, 1e-9).map_err(|e| format!("instance {i}: {e}"))?;
            ensure(verify_certificate(&p, &c, &pt, 1e-8), || format!("instance {i}: certificate fails"))?;
            ensure(c.depth <= p.num_constraints(), || format!("instance {i}: depth {}", c.depth))?;
            ensure(c.points.len() <= 1 << p.num_constraints(), || format!("instance {i}: {} points", c.points.len()))?;
            ensure(faces_grow(&c), || format!("instance {i}: face dimension did not grow"))?;
            max_depth = max_depth.max(c.depth);
            certs += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 60_000)?;
    Ok(format!("{certs} certificates verified, max depth {max_depth} (≤ m = 1), {elapsed:?}"))
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let mut faces = 0;
    for i in 0..20u64 {
        let p = generators::quadratic_matrix_program(2, 3, 2, 2000 + i).map_err(|e| e.to_string())?;
        let kron = linalg::kron_multiplicity(&p);
        ensure(kron.k >= 3, || format!("instance {i}: k = {}", kron.k))?;
        let a = certify::analyze(&p, None).map_err(|e| e.to_string())?;
        ensure(a.report.theorem2 == Verdict::Pass, || format!("instance {i}: symmetry condition fails"))?;
        let model = a.model.ok_or("no dual model")?;
        for f in model.gamma.enumerate_faces().map_err(|e| e.to_string())? {
            if let FaceClass::Semidefinite { basis, .. } = model.classify_face(&f, &p) {
                ensure(basis.ncols() >= kron.k, || format!("instance {i}: dim V(F) = {} < k", basis.ncols()))?;
                faces += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 30_000)?;
    Ok(format!("20 instances, {faces} semidefinite faces all with dim V(F) ≥ k, {elapsed:?}"))
}

/// `(instance, probe half-width, sampling half-width)`.
fn oracle_instances() -> Vec<(String, Qcqp, f64, f64)> {
    let mut v = vec![("example1".to_string(), example1(), 5.0, 15.0)];
    for s in 0..4 {
        v.push((format!("gtrs/{s}"), generators::gtrs(2, 3000 + s).unwrap(), 2.0, 8.0));
    }
    for (s, (a, b, c)) in [(1, 1, 0), (1, 0, 1), (0, 1, 1)].into_iter().enumerate() {
        let p = generators::swiss_cheese(2, a, b, c, 4000 + s as u64).unwrap();
        v.push((format!("swiss/{s}"), p, 2.0, 8.0));
    }
    for s in 0..3 {
        v.push((format!("zero-linear/{s}"), common::diagonal_zero_linear(2, 2, 5000 + s), 2.0, 8.0));
    }
    v
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let margin = 1e-3;
    let mut rng = common::rng(7);
    let mut worst = 1.0f64;
    let mut total = 0;
    let mut agree_total = 0;
    for (name, p, r, big) in oracle_instances() {
        let a = certify::analyze(&p, None).map_err(|e| e.to_string())?;
        ensure(a.report.hull_guaranteed, || format!("{name}: no sufficient condition holds"))?;
        let model = a.model.ok_or("no dual model")?;
        let d = soc_description(&model.gamma.v, &p).map_err(|e| e.to_string())?;
        let oracle = common::HullOracle::new(&p, -big, big, 80, 800);
        let mut agree = 0;
        let mut probes = 0;
        while probes < 1000 {
            let x = DVector::from_fn(2, |_, _| rng.random_range(-r..r));
            let hmax = d.max_homogeneous(&x);
            if hmax.abs() < margin {
                continue;
            }
            let th = if hmax > 0.0 { f64::INFINITY } else { d.objective(&x) / 2.0 };
            let offset = rng.random_range(margin..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let t = if th.is_finite() { th + offset } else { rng.random_range(-50.0..50.0) };
            let pt = EpigraphPoint::new(x.clone(), t);
            let mine = dsdp_membership(&d, &pt, 0.0).inside;
            let theirs = oracle.contains(x[0], x[1], t);
            probes += 1;
            if mine == theirs {
                agree += 1;
            }
        }
        let rate = agree as f64 / probes as f64;
        worst = worst.min(rate);
        total += probes;
        agree_total += agree;
        ensure(rate >= 0.995, || format!("{name}: agreement {rate:.4} with {} samples", oracle.num_samples()))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 120_000)?;
    Ok(format!("{agree_total}/{total} probes agree, worst instance {:.2}%, {elapsed:?}", worst * 100.0))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 Example 1 multiplier polyhedron", criterion1),
        ("2 Example 1 hull description", criterion2),
        ("3 Example 1 optimum", criterion3),
        ("4 decomposition certificate", criterion4),
        ("5 single-constraint family", criterion5),
        ("6 symmetric matrix-program family", criterion6),
        ("7 two-dimensional hull oracle", criterion7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("acceptance {name}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("acceptance {name}: FAIL ({msg})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
