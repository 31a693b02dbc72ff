//! JSON documents read and written by the command line tool.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use qcqp_hull::hull::{ConvexCombination, TraceStep};
use qcqp_hull::{EpigraphPoint, Qcqp, QuadraticFn, SocDescription};
use serde::{Deserialize, Serialize};

/// `xᵀAx + 2bᵀx + c` with `A` stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticEntry {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadraticEntry {
    pub fn from_quadratic(q: &QuadraticFn) -> Self {
        let a = q.a();
        Self {
            a: (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect(),
            b: q.b().iter().copied().collect(),
            c: q.c(),
        }
    }

    pub fn to_quadratic(&self, n: usize) -> Result<QuadraticFn, String> {
        if self.a.len() != n || self.a.iter().any(|r| r.len() != n) {
            return Err(format!("A must be {n}×{n}"));
        }
        if self.b.len() != n {
            return Err(format!("b must have length {n}, found {}", self.b.len()));
        }
        let a = DMatrix::from_fn(n, n, |i, j| self.a[i][j]);
        QuadraticFn::new(a, DVector::from_column_slice(&self.b), self.c).map_err(|e| e.to_string())
    }
}

/// A problem: `quadratics[0]` is the objective, followed by `mi` inequalities
/// and `me` equalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub mi: usize,
    pub me: usize,
    pub quadratics: Vec<QuadraticEntry>,
}

impl ProblemFile {
    pub fn from_problem(p: &Qcqp) -> Self {
        Self {
            n: p.dimension(),
            mi: p.num_inequalities(),
            me: p.num_equalities(),
            quadratics: p.quadratics().map(QuadraticEntry::from_quadratic).collect(),
        }
    }

    pub fn to_problem(&self) -> Result<Qcqp, String> {
        if self.quadratics.len() != 1 + self.mi + self.me {
            return Err(format!(
                "expected {} quadratics (objective, {} inequalities, {} equalities), found {}",
                1 + self.mi + self.me,
                self.mi,
                self.me,
                self.quadratics.len()
            ));
        }
        let mut qs = self
            .quadratics
            .iter()
            .enumerate()
            .map(|(i, q)| q.to_quadratic(self.n).map_err(|e| format!("quadratic {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let objective = qs.remove(0);
        Qcqp::new(objective, qs, self.mi).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub x: Vec<f64>,
    pub t: f64,
}

impl PointEntry {
    pub fn from_point(p: &EpigraphPoint) -> Self {
        Self { x: p.x.iter().copied().collect(), t: p.t }
    }

    pub fn to_point(&self) -> EpigraphPoint {
        EpigraphPoint::from_slice(&self.x, self.t)
    }
}

/// A decomposition of `point` into epigraph points, checkable without
/// rerunning the recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub point: PointEntry,
    pub weights: Vec<f64>,
    pub points: Vec<PointEntry>,
    pub trace: Vec<TraceStep>,
    pub tol: f64,
}

impl CertificateFile {
    pub fn new(target: &EpigraphPoint, c: &ConvexCombination, tol: f64) -> Self {
        Self {
            point: PointEntry::from_point(target),
            weights: c.weights.clone(),
            points: c.points.iter().map(PointEntry::from_point).collect(),
            trace: c.trace.clone(),
            tol,
        }
    }

    pub fn verify(&self, p: &Qcqp) -> bool {
        let points: Vec<_> = self.points.iter().map(PointEntry::to_point).collect();
        qcqp_hull::hull::verify_points(p, &points, &self.weights, &self.point.to_point(), self.tol)
    }
}

/// `g_e(x) ≤ 2t` for each entry of `epigraph`, `h_r(x) ≤ 0` for each entry of
/// `homogeneous`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullFile {
    pub n: usize,
    pub epigraph: Vec<QuadraticEntry>,
    pub homogeneous: Vec<QuadraticEntry>,
    pub vertex_multipliers: Vec<Vec<f64>>,
    pub ray_multipliers: Vec<Vec<f64>>,
}

impl HullFile {
    pub fn from_description(d: &SocDescription) -> Self {
        Self {
            n: d.dimension(),
            epigraph: d.epigraph.iter().map(QuadraticEntry::from_quadratic).collect(),
            homogeneous: d.homogeneous.iter().map(QuadraticEntry::from_quadratic).collect(),
            vertex_multipliers: d.vertex_multipliers.clone(),
            ray_multipliers: d.ray_multipliers.clone(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes through a sibling temporary file so readers never see a partial
/// document.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
