//! The convex hull of the epigraph as finitely many convex quadratic
//! constraints, and constructive decomposition of relaxation points into
//! convex combinations of true epigraph points.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{DualModel, FaceClass, OptimalFace, PolyhedronV};
use crate::linalg;
use crate::problem::{EpigraphPoint, QuadraticFn, Qcqp};

/// Relative threshold below which coefficients of a one-dimensional
/// quadratic are treated as zero.
const COEF_TOL: f64 = 1e-10;

/// `g_e(x) ≤ 2t` for every vertex `γ_e` of Γ and `h_r(x) ≤ 0` for every
/// extreme ray `γ_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SocDescription {
    pub epigraph: Vec<QuadraticFn>,
    pub homogeneous: Vec<QuadraticFn>,
    pub vertex_multipliers: Vec<Vec<f64>>,
    pub ray_multipliers: Vec<Vec<f64>>,
}

impl SocDescription {
    pub fn dimension(&self) -> usize {
        self.epigraph[0].dim()
    }

    /// `max_e g_e(x)`, i.e. twice the least `t` with `(x, t)` in the hull
    /// when every homogeneous constraint holds.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.epigraph.iter().map(|g| g.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_homogeneous(&self, x: &DVector<f64>) -> f64 {
        self.homogeneous.iter().map(|h| h.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the hull description from the vertices and rays of Γ.
///
/// Ray constraints that reduce to a constant `c ≤ 0` are dropped.
pub fn soc_description(v: &PolyhedronV, p: &Qcqp) -> Result<SocDescription> {
    if v.is_empty() {
        return Err(Error::MissingAssumption("the multiplier set is empty".into()));
    }
    let mut epigraph = Vec::with_capacity(v.vertices.len());
    for g in &v.vertices {
        epigraph.push(p.lagrangian(g)?);
    }
    let mut homogeneous = Vec::new();
    let mut ray_multipliers = Vec::new();
    for r in &v.rays {
        let h = p.constraint_combination(r)?;
        if h.is_constant(COEF_TOL * p.scale()) && h.c() <= 0.0 {
            continue;
        }
        homogeneous.push(h);
        ray_multipliers.push(r.clone());
    }
    Ok(SocDescription { epigraph, homogeneous, vertex_multipliers: v.vertices.clone(), ray_multipliers })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// `max(max_e g_e(x) − 2t, max_r h_r(x))`; zero on the boundary.
    pub worst_violation: f64,
}

pub fn dsdp_membership(d: &SocDescription, pt: &EpigraphPoint, tol: f64) -> Membership {
    let worst = (d.objective(&pt.x) - 2.0 * pt.t).max(d.max_homogeneous(&pt.x));
    Membership { inside: worst <= tol, worst_violation: worst }
}

/// The split performed at a semidefinite face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    /// Unit direction in `V(F)`.
    pub v: Vec<f64>,
    /// Slope of `t` along `v`.
    pub s: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// Weight of the `α₊` child.
    pub lambda: f64,
}

/// One visited node of the recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub depth: usize,
    pub parent: Option<usize>,
    pub active_rows: Vec<usize>,
    pub aff_dim: usize,
    pub definite: bool,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombination {
    pub points: Vec<EpigraphPoint>,
    pub weights: Vec<f64>,
    pub trace: Vec<TraceStep>,
    /// Number of splitting rounds along the deepest branch.
    pub depth: usize,
}

/// Smallest positive and largest negative roots. `None` means no root on that
/// side.
fn roots(a: f64, beta: f64, c: f64, scale: f64) -> (Option<f64>, Option<f64>) {
    // a α² + 2β α + c with c < 0 and a ≥ 0 up to rounding
    let tiny = COEF_TOL * scale;
    if a.abs() <= tiny {
        if beta.abs() <= tiny {
            return (None, None);
        }
        let r = -c / (2.0 * beta);
        return if r > 0.0 { (Some(r), None) } else { (None, Some(r)) };
    }
    let disc = (beta * beta - a * c).max(0.0);
    let sq = disc.sqrt();
    // numerically stable pair
    let q = -(beta + beta.signum() * sq);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let plus = [lo, hi].into_iter().filter(|r| *r > 0.0).reduce(f64::min);
    let minus = [lo, hi].into_iter().filter(|r| *r < 0.0).reduce(f64::max);
    (plus, minus)
}

struct Decomposer<'a> {
    p: &'a Qcqp,
    model: &'a DualModel,
    tol: f64,
    vertex_fns: Vec<QuadraticFn>,
    ray_fns: Vec<QuadraticFn>,
    points: Vec<EpigraphPoint>,
    weights: Vec<f64>,
    trace: Vec<TraceStep>,
    depth: usize,
}

impl Decomposer<'_> {
    fn run(&mut self, x: DVector<f64>, t: f64, weight: f64, depth: usize, parent: Option<usize>) -> Result<()> {
        let limit = self.p.num_constraints() + 1;
        if depth > limit {
            return Err(Error::GuardExceeded { what: "decomposition depth", value: depth, limit });
        }
        let (sup, face) = match self.model.optimal_face(self.p, &x, self.tol)? {
            OptimalFace::UnboundedAbove => return Err(Error::NotInDsdp(f64::INFINITY)),
            OptimalFace::Bounded { sup, face } => (sup, face),
        };
        let scale = sup.abs().max(1.0);
        if sup > 2.0 * t + self.tol * scale {
            return Err(Error::NotInDsdp(sup - 2.0 * t));
        }
        let t0 = sup / 2.0;
        let surplus = t - t0;
        let class = self.model.classify_face(&face, self.p);
        let node = self.trace.len();
        self.trace.push(TraceStep {
            depth,
            parent,
            active_rows: face.active_rows.clone(),
            aff_dim: face.aff_dim,
            definite: class.is_definite(),
            split: None,
        });
        self.depth = self.depth.max(depth);

        let (basis, b_aff_dim) = match class {
            FaceClass::Definite { .. } => {
                self.points.push(EpigraphPoint::new(x, t));
                self.weights.push(weight);
                return Ok(());
            }
            FaceClass::Semidefinite { basis, b_aff_dim } => (basis, b_aff_dim),
        };

        // ⟨b(γ), V w⟩ = s on vertices, ⟨b̆(r), V w⟩ = 0 on rays
        let gv = &self.model.gamma.v;
        let d = basis.ncols();
        let nrows = face.vertices.len() + face.rays.len();
        let mut e = nalgebra::DMatrix::zeros(nrows, d + 1);
        for (row, &g) in face.vertices.iter().enumerate() {
            let bv = basis.transpose() * self.p.linear_part(&gv.vertices[g]);
            for j in 0..d {
                e[(row, j)] = bv[j];
            }
            e[(row, d)] = -1.0;
        }
        for (k, &r) in face.rays.iter().enumerate() {
            let bv = basis.transpose() * self.p.linear_part_direction(&gv.rays[r]);
            for j in 0..d {
                e[(face.vertices.len() + k, j)] = bv[j];
            }
        }
        let no_direction = || Error::NoDescentDirection {
            active_rows: face.active_rows.clone(),
            dim_v: d,
            b_aff_dim,
        };
        let ws = linalg::solve_homogeneous(&e).ok_or_else(no_direction)?;
        let w = ws.rows(0, d).into_owned();
        let mut v = &basis * &w;
        let nv = v.norm();
        if nv <= 1e-12 {
            return Err(no_direction());
        }
        let mut s = ws[d] / nv;
        v /= nv;
        let before = v.clone();
        linalg::fix_sign_first(&mut v);
        if v != before {
            s = -s;
        }

        let mut plus: Option<f64> = None;
        let mut minus: Option<f64> = None;
        let mut consider = |a: f64, beta: f64, c: f64| {
            let mag = a.abs().max(beta.abs()).max(c.abs()).max(scale);
            if a.abs() <= COEF_TOL * mag && beta.abs() <= COEF_TOL * mag && c.abs() <= self.tol * mag {
                return;
            }
            let (rp, rm) = roots(a, beta, c, mag);
            if let Some(r) = rp {
                plus = Some(plus.map_or(r, |p| p.min(r)));
            }
            if let Some(r) = rm {
                minus = Some(minus.map_or(r, |m| m.max(r)));
            }
        };
        for g in &self.vertex_fns {
            let (a, beta, c) = g.along_line(&x, &v);
            consider(a, beta - s, c - 2.0 * t0);
        }
        for h in &self.ray_fns {
            let (a, beta, c) = h.along_line(&x, &v);
            consider(a, beta, c);
        }
        let (ap, am) = match (plus, minus) {
            (Some(ap), Some(am)) => (ap, am),
            _ => {
                return Err(Error::MissingAssumption(
                    "no constraint bounds the epigraph along the splitting direction".into(),
                ))
            }
        };
        let lambda = -am / (ap - am);
        self.trace[node].split =
            Some(Split { v: v.iter().copied().collect(), s, alpha_plus: ap, alpha_minus: am, lambda });

        let first = self.points.len();
        self.run(&x + &v * ap, t0 + ap * s, weight * lambda, depth + 1, Some(node))?;
        self.run(&x + &v * am, t0 + am * s, weight * (1.0 - lambda), depth + 1, Some(node))?;
        for pt in &mut self.points[first..] {
            pt.t += surplus;
        }
        Ok(())
    }
}

/// Writes a point of `D_SDP` as a convex combination of points of the
/// epigraph `D`.
pub fn decompose(p: &Qcqp, model: &DualModel, pt: &EpigraphPoint, tol: f64) -> Result<ConvexCombination> {
    if pt.x.len() != p.dimension() {
        return Err(Error::DimensionMismatch { expected: p.dimension(), found: pt.x.len() });
    }
    if !pt.is_finite() {
        return Err(Error::InvalidProblem("non-finite point".into()));
    }
    let gv = &model.gamma.v;
    let vertex_fns = gv.vertices.iter().map(|g| p.lagrangian(g)).collect::<Result<Vec<_>>>()?;
    let ray_fns = gv.rays.iter().map(|r| p.constraint_combination(r)).collect::<Result<Vec<_>>>()?;
    let mut dec = Decomposer {
        p,
        model,
        tol,
        vertex_fns,
        ray_fns,
        points: Vec::new(),
        weights: Vec::new(),
        trace: Vec::new(),
        depth: 0,
    };
    dec.run(pt.x.clone(), pt.t, 1.0, 0, None)?;
    Ok(ConvexCombination { points: dec.points, weights: dec.weights, trace: dec.trace, depth: dec.depth })
}

/// Checks a certificate from its points and weights alone: weights positive
/// and summing to one, the weighted mean reproducing `target`, and every point
/// lying in the epigraph.
pub fn verify_certificate(p: &Qcqp, c: &ConvexCombination, target: &EpigraphPoint, tol: f64) -> bool {
    verify_points(p, &c.points, &c.weights, target, tol)
}

pub fn verify_points(p: &Qcqp, points: &[EpigraphPoint], weights: &[f64], target: &EpigraphPoint, tol: f64) -> bool {
    let n = p.dimension();
    if points.is_empty() || points.len() != weights.len() || target.x.len() != n {
        return false;
    }
    if points.iter().any(|pt| pt.x.len() != n || !pt.is_finite()) {
        return false;
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return false;
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > tol {
        return false;
    }
    let mut x = DVector::zeros(n);
    let mut t = 0.0;
    for (pt, w) in points.iter().zip(weights) {
        x.axpy(*w, &pt.x, 1.0);
        t += w * pt.t;
    }
    let scale = target.x.amax().max(target.t.abs()).max(1.0);
    if (x - &target.x).amax() > tol * scale || (t - target.t).abs() > tol * scale {
        return false;
    }
    points.iter().all(|pt| p.check_feasible(pt, tol).feasible)
}
