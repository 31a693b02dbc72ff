//! Grid data for two-dimensional instances: the least `t` putting `(x, t)` in
//! the epigraph and in the hull description.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::SocDescription;
use crate::problem::{Qcqp, FEAS_TOL};
use crate::solve::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub x1: f64,
    pub x2: f64,
    /// `q_0(x)/2` when `x` is feasible, `+∞` otherwise.
    pub tmin_d: f64,
    /// `max_e g_e(x)/2` when every homogeneous constraint holds, `+∞`
    /// otherwise.
    pub tmin_hull: f64,
}

pub fn tmin_d(p: &Qcqp, x: &DVector<f64>, tol: f64) -> f64 {
    let ok = p.constraints().iter().enumerate().all(|(i, q)| {
        let v = q.value(x);
        if p.is_inequality(i + 1) { v <= tol } else { v.abs() <= tol }
    });
    if ok { p.objective().value(x) / 2.0 } else { f64::INFINITY }
}

pub fn tmin_hull(d: &SocDescription, x: &DVector<f64>, tol: f64) -> f64 {
    if d.homogeneous.iter().all(|h| h.value(x) <= tol) {
        d.objective(x) / 2.0
    } else {
        f64::INFINITY
    }
}

/// Samples a `resolution × resolution` grid over `bounds`, rows ordered with
/// `x1` varying fastest.
pub fn plot2d(p: &Qcqp, d: &SocDescription, bounds: &Bounds, resolution: usize) -> Result<Vec<PlotRow>> {
    if p.dimension() != 2 || d.dimension() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dimension() });
    }
    if bounds.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: bounds.dim() });
    }
    if resolution < 2 {
        return Err(Error::InvalidParameters("resolution must be at least 2".into()));
    }
    let coord = |j: usize, k: usize| {
        bounds.lo[j] + (bounds.hi[j] - bounds.lo[j]) * k as f64 / (resolution - 1) as f64
    };
    let mut rows = Vec::with_capacity(resolution * resolution);
    for k2 in 0..resolution {
        for k1 in 0..resolution {
            let x = DVector::from_column_slice(&[coord(0, k1), coord(1, k2)]);
            rows.push(PlotRow {
                x1: x[0],
                x2: x[1],
                tmin_d: tmin_d(p, &x, FEAS_TOL),
                tmin_hull: tmin_hull(d, &x, FEAS_TOL),
            });
        }
    }
    Ok(rows)
}

fn fmt(v: f64) -> String {
    if v.is_infinite() { "inf".to_string() } else { format!("{v}") }
}

pub fn to_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("x1,x2,tmin_d,tmin_hull\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", fmt(r.x1), fmt(r.x2), fmt(r.tmin_d), fmt(r.tmin_hull)));
    }
    out
}
