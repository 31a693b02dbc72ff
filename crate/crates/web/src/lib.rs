//! WebAssembly bindings for the browser demo. Every export takes and returns
//! JSON text; failures come back as `{"error": "..."}`.

use nalgebra::DVector;
use qcqp_hull::certify;
use qcqp_hull::generators::{self, FamilySpec};
use qcqp_hull::hull::{decompose, soc_description, verify_certificate};
use qcqp_hull::plot::{self, tmin_hull};
use qcqp_hull::solve::Bounds;
use qcqp_hull::{DualModel, EpigraphPoint, Qcqp};
use qcqp_hull_cli::files::{CertificateFile, ProblemFile};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

const TOL: f64 = 1e-8;

fn problem(json: &str) -> Result<Qcqp, String> {
    let f: ProblemFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    f.to_problem()
}

fn answer<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error(&e.to_string())),
        Err(e) => error(&e),
    }
}

fn error(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

/// Problem file for `example1`, `gtrs`, `swiss` or `holes`.
pub fn example_problem(name: &str, seed: u64) -> Result<ProblemFile, String> {
    let spec = match name {
        "example1" => FamilySpec::Example1,
        "gtrs" => FamilySpec::Gtrs { n: 2, seed },
        "swiss" => FamilySpec::SwissCheese { n: 2, inside: 1, outside: 1, linear: 1, seed },
        "holes" => FamilySpec::SwissCheese { n: 2, inside: 0, outside: 2, linear: 0, seed },
        other => return Err(format!("unknown example `{other}`")),
    };
    generators::generate(&spec).map(|p| ProblemFile::from_problem(&p)).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Grid {
    pub resolution: usize,
    pub lo: f64,
    pub hi: f64,
    /// Row-major with `x1` varying fastest; `null` where infeasible.
    pub tmin_d: Vec<Option<f64>>,
    pub tmin_hull: Vec<Option<f64>>,
}

pub fn plot_grid(p: &Qcqp, lo: f64, hi: f64, resolution: usize) -> Result<Grid, String> {
    let bounds = Bounds::cube(2, lo, hi).map_err(|e| e.to_string())?;
    let model = DualModel::new(p).map_err(|e| e.to_string())?;
    let d = soc_description(&model.gamma.v, p).map_err(|e| e.to_string())?;
    let rows = plot::plot2d(p, &d, &bounds, resolution).map_err(|e| e.to_string())?;
    let finite = |v: f64| v.is_finite().then_some(v);
    Ok(Grid {
        resolution,
        lo,
        hi,
        tmin_d: rows.iter().map(|r| finite(r.tmin_d)).collect(),
        tmin_hull: rows.iter().map(|r| finite(r.tmin_hull)).collect(),
    })
}

/// Decomposes `(x, tmin_hull(x) + lift)`.
pub fn decompose_at(p: &Qcqp, x1: f64, x2: f64, lift: f64) -> Result<CertificateFile, String> {
    let model = DualModel::new(p).map_err(|e| e.to_string())?;
    let d = soc_description(&model.gamma.v, p).map_err(|e| e.to_string())?;
    let x = DVector::from_column_slice(&[x1, x2]);
    let t = tmin_hull(&d, &x, 0.0);
    if !t.is_finite() {
        return Err("point lies outside the projection of the hull".into());
    }
    let target = EpigraphPoint::new(x, t + lift.max(0.0));
    let c = decompose(p, &model, &target, TOL * 0.1).map_err(|e| e.to_string())?;
    if !verify_certificate(p, &c, &target, TOL) {
        return Err("certificate does not verify".into());
    }
    Ok(CertificateFile::new(&target, &c, TOL))
}

#[wasm_bindgen(js_name = exampleProblem)]
pub fn example_problem_js(name: &str, seed: u64) -> String {
    answer(example_problem(name, seed))
}

#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(problem_json: &str) -> String {
    answer(problem(problem_json).and_then(|p| certify::analyze(&p, None).map(|a| a.report).map_err(|e| e.to_string())))
}

#[wasm_bindgen(js_name = plotGrid)]
pub fn plot_grid_js(problem_json: &str, lo: f64, hi: f64, resolution: usize) -> String {
    answer(problem(problem_json).and_then(|p| plot_grid(&p, lo, hi, resolution)))
}

#[wasm_bindgen(js_name = decomposeAt)]
pub fn decompose_at_js(problem_json: &str, x1: f64, x2: f64, lift: f64) -> String {
    answer(problem(problem_json).and_then(|p| decompose_at(&p, x1, x2, lift)))
}
