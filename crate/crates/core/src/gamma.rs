//! The set of convex Lagrange multipliers
//! `Γ = {γ : A(γ) ⪰ 0, γ_i ≥ 0 for inequalities}`, materialized as a
//! polyhedron when the Hessians are simultaneously diagonalizable.
//!
//! In a diagonalizing basis `A(γ) ⪰ 0` reads `λ_j(γ) ≥ 0` for each
//! coordinate `j`, so Γ is cut out by `N + m_I` linear inequalities. The
//! vertex/ray description is obtained by the double description method on
//! the homogenized cone, which also handles a nontrivial lineality space.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DefinitenessStatus, SimDiag};
use crate::problem::Qcqp;

/// Combinatorial guard on the multiplier dimension `m` for [`dd_vrep`].
pub const MAX_DD_DIM: usize = 12;
/// Combinatorial guard on the number of H-rows for [`Gamma::enumerate_faces`].
pub const MAX_FACE_ROWS: usize = 20;
/// Absolute activity tolerance on normalized rows.
pub const FACE_TOL: f64 = 1e-8;
/// Zero tolerance inside the double description iteration.
const DD_TOL: f64 = 1e-10;
/// Tolerance for affine ranks of generator sets.
const RANK_TOL: f64 = 1e-9;

/// Where an H-row comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOrigin {
    /// `λ_j(γ) ≥ 0` for diagonal coordinate `j` (0-based).
    Eigenvalue(usize),
    /// `γ_i ≥ 0` for inequality constraint `i` (1-based).
    Sign(usize),
}

/// A row `aᵀγ + β ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRow {
    pub a: Vec<f64>,
    pub beta: f64,
    pub origin: RowOrigin,
}

impl HRow {
    pub fn value(&self, gamma: &[f64]) -> f64 {
        dot(&self.a, gamma) + self.beta
    }

    fn norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Row scaled so that `‖a‖ = 1` (left as is when `a = 0`).
    fn normalized(&self) -> (Vec<f64>, f64) {
        let n = self.norm();
        if n == 0.0 {
            (self.a.clone(), self.beta)
        } else {
            (self.a.iter().map(|v| v / n).collect(), self.beta / n)
        }
    }
}

/// Inequality description of Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronH {
    pub dim: usize,
    pub rows: Vec<HRow>,
}

impl PolyhedronH {
    pub fn contains(&self, gamma: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| {
            let (a, b) = r.normalized();
            dot(&a, gamma) + b >= -tol
        })
    }
}

/// Minkowski-Weyl description `Γ = conv(vertices) + cone(rays)`.
///
/// When Γ has a lineality space `L`, vertices lie in `L^⊥` and `L` is
/// spanned by pairs of opposite rays.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyhedronV {
    pub vertices: Vec<Vec<f64>>,
    /// Unit-norm extreme directions.
    pub rays: Vec<Vec<f64>>,
}

impl PolyhedronV {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A nonempty face of Γ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    /// Indices of H-rows binding on the whole face, sorted.
    pub active_rows: Vec<usize>,
    /// Indices into [`PolyhedronV::vertices`].
    pub vertices: Vec<usize>,
    /// Indices into [`PolyhedronV::rays`].
    pub rays: Vec<usize>,
    pub aff_dim: usize,
}

/// Definite faces contain some `γ` with `A(γ) ≻ 0`; semidefinite ones share
/// a nontrivial kernel `V(F)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceClass {
    Definite {
        witness: Vec<f64>,
    },
    Semidefinite {
        /// Orthonormal basis of `V(F)`, one column per dimension.
        basis: DMatrix<f64>,
        /// Affine dimension of `{b(γ) : γ ∈ F}`.
        b_aff_dim: usize,
    },
}

impl FaceClass {
    pub fn is_definite(&self) -> bool {
        matches!(self, FaceClass::Definite { .. })
    }
}

/// Result of maximizing `γ ↦ q(γ, x)` over Γ.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimalFace {
    Bounded { sup: f64, face: Face },
    UnboundedAbove,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Colexicographic order: compare the last coordinate first.
fn colex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// The H-description of Γ in the diagonal basis `diag`: one row per
/// coordinate followed by one sign row per inequality multiplier.
pub fn build_gamma(p: &Qcqp, diag: &SimDiag) -> PolyhedronH {
    let m = p.num_constraints();
    let mut rows = Vec::with_capacity(diag.dimension() + p.num_inequalities());
    for j in 0..diag.dimension() {
        rows.push(HRow {
            a: (1..=m).map(|i| diag.diagonals[i][j]).collect(),
            beta: diag.diagonals[0][j],
            origin: RowOrigin::Eigenvalue(j),
        });
    }
    for i in 1..=p.num_inequalities() {
        let mut a = vec![0.0; m];
        a[i - 1] = 1.0;
        rows.push(HRow { a, beta: 0.0, origin: RowOrigin::Sign(i) });
    }
    PolyhedronH { dim: m, rows }
}

/// Vertex/ray description of `h` by the double description method.
///
/// An empty vertex list means Γ is empty.
pub fn dd_vrep(h: &PolyhedronH) -> Result<PolyhedronV> {
    if h.dim > MAX_DD_DIM {
        return Err(Error::GuardExceeded { what: "multiplier dimension", value: h.dim, limit: MAX_DD_DIM });
    }
    let rows: Vec<(Vec<f64>, f64)> = h.rows.iter().map(|r| (r.a.clone(), r.beta)).collect();
    Ok(double_description(h.dim, &rows))
}

struct DdRay {
    v: DVector<f64>,
    /// Flags over processed constraints on which the ray is zero.
    zero: Vec<bool>,
}

fn double_description(dim: usize, raw_rows: &[(Vec<f64>, f64)]) -> PolyhedronV {
    let d = dim + 1;

    // normalized, deduplicated homogenized rows; trivial rows dropped
    let mut cons: Vec<DVector<f64>> = Vec::new();
    for (a, beta) in raw_rows {
        let n = norm(a);
        if n <= 1e-14 {
            if *beta < -FACE_TOL {
                return PolyhedronV::default();
            }
            continue;
        }
        let mut h = DVector::zeros(d);
        for (i, v) in a.iter().enumerate() {
            h[i] = v / n;
        }
        h[dim] = beta / n;
        if !cons.iter().any(|c| (c - &h).amax() <= 1e-12) {
            cons.push(h);
        }
    }
    // τ ≥ 0 is processed first
    let mut tau = DVector::zeros(d);
    tau[dim] = 1.0;
    cons.insert(0, tau);

    let ncons = cons.len();
    let mut lin: Vec<DVector<f64>> = (0..d)
        .map(|i| {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<DdRay> = Vec::new();

    for (ci, h) in cons.iter().enumerate() {
        // lineality step
        let pivot = lin
            .iter()
            .enumerate()
            .map(|(i, l)| (i, h.dot(l)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        if let Some((pi, hl)) = pivot.filter(|(_, hl)| hl.abs() > DD_TOL) {
            let mut l = lin.remove(pi);
            let mut hl = hl;
            if hl < 0.0 {
                l.neg_mut();
                hl = -hl;
            }
            for other in lin.iter_mut() {
                let c = h.dot(other) / hl;
                other.axpy(-c, &l, 1.0);
            }
            lin = linalg::orthonormal_basis(&lin, 1e-12);
            for r in rays.iter_mut() {
                let c = h.dot(&r.v) / hl;
                r.v.axpy(-c, &l, 1.0);
                let nr = r.v.norm();
                r.v /= nr;
                r.zero[ci] = true;
            }
            let mut zero = vec![false; ncons];
            for z in zero.iter_mut().take(ci) {
                *z = true;
            }
            let nl = l.norm();
            rays.push(DdRay { v: l / nl, zero });
            continue;
        }

        // standard step on the pointed part
        let vals: Vec<f64> = rays.iter().map(|r| h.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > DD_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -DD_TOL).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i].abs() <= DD_TOL {
                    r.zero[ci] = true;
                }
            }
            continue;
        }
        let pointed_dim = d - lin.len();
        let mut new_rays: Vec<DdRay> = Vec::new();
        for &pi in &pos {
            for &ni in &neg {
                let common: Vec<usize> =
                    (0..ci).filter(|&k| rays[pi].zero[k] && rays[ni].zero[k]).collect();
                if common.len() + 2 < pointed_dim {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(ri, r)| {
                    ri != pi && ri != ni && common.iter().all(|&k| r.zero[k])
                });
                if blocked {
                    continue;
                }
                let mut w = &rays[ni].v * vals[pi] - &rays[pi].v * vals[ni];
                let nw = w.norm();
                if nw <= 1e-14 {
                    continue;
                }
                w /= nw;
                let mut zero = vec![false; ncons];
                for &k in &common {
                    zero[k] = true;
                }
                zero[ci] = true;
                new_rays.push(DdRay { v: w, zero });
            }
        }
        let mut kept: Vec<DdRay> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i] < -DD_TOL {
                continue;
            }
            if vals[i].abs() <= DD_TOL {
                r.zero[ci] = true;
            }
            kept.push(r);
        }
        kept.extend(new_rays);
        rays = kept;
    }

    // back to γ-space
    let lin_gamma: Vec<DVector<f64>> = lin
        .iter()
        .map(|l| DVector::from_iterator(dim, l.iter().take(dim).copied()))
        .collect();
    let lin_basis = linalg::orthonormal_basis(&lin_gamma, 1e-12);
    let project = |v: DVector<f64>| -> DVector<f64> {
        let mut w = v;
        for b in &lin_basis {
            let c = b.dot(&w);
            w.axpy(-c, b, 1.0);
        }
        w
    };

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for r in &rays {
        let t = r.v[dim];
        let g = DVector::from_iterator(dim, r.v.iter().take(dim).copied());
        if t > DD_TOL {
            let vtx = project(g / t);
            let vtx: Vec<f64> = vtx.iter().map(|v| clean(*v)).collect();
            if !vertices.iter().any(|u| max_diff(u, &vtx) <= 1e-9) {
                vertices.push(vtx);
            }
        } else {
            let g = project(g);
            let n = g.norm();
            if n > 1e-12 {
                push_direction(&mut dirs, (g / n).iter().map(|v| clean(*v)).collect());
            }
        }
    }
    if vertices.is_empty() {
        return PolyhedronV::default();
    }
    for b in &lin_basis {
        push_direction(&mut dirs, b.iter().map(|v| clean(*v)).collect());
        push_direction(&mut dirs, b.iter().map(|v| clean(-*v)).collect());
    }
    vertices.sort_by(|a, b| colex(a, b));
    dirs.sort_by(|a, b| colex(a, b));
    PolyhedronV { vertices, rays: dirs }
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-15 { 0.0 } else { v }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn push_direction(dirs: &mut Vec<Vec<f64>>, d: Vec<f64>) {
    if !dirs.iter().any(|u| max_diff(u, &d) <= 1e-9) {
        dirs.push(d);
    }
}

/// A multiplier with every eigenvalue row strictly positive, maximizing the
/// smallest eigenvalue row (capped at 1) over Γ.
pub fn find_gamma_star(h: &PolyhedronH) -> Result<Vec<f64>> {
    let m = h.dim;
    if m > MAX_DD_DIM {
        return Err(Error::GuardExceeded { what: "multiplier dimension", value: m, limit: MAX_DD_DIM });
    }
    let scale = h
        .rows
        .iter()
        .flat_map(|r| r.a.iter().chain(std::iter::once(&r.beta)))
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    // variables (γ, μ); rows λ_j(γ) − μ ≥ 0, γ_i ≥ 0, 1 − μ ≥ 0
    let mut lifted: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in &h.rows {
        let mut a = r.a.clone();
        match r.origin {
            RowOrigin::Eigenvalue(_) => a.push(-1.0),
            RowOrigin::Sign(_) => a.push(0.0),
        }
        lifted.push((a, r.beta));
    }
    let mut cap = vec![0.0; m + 1];
    cap[m] = -1.0;
    lifted.push((cap, 1.0));
    let v = double_description(m + 1, &lifted);

    let margin = linalg::PSD_TOL * scale;
    let best = v
        .vertices
        .iter()
        .filter(|g| g[m] > margin)
        .max_by(|a, b| {
            let (ma, mb) = (a[m], b[m]);
            if (ma - mb).abs() > 1e-12 {
                return ma.total_cmp(&mb);
            }
            // prefer smaller multipliers, then colex order
            norm(&b[..m]).total_cmp(&norm(&a[..m])).then(colex(&b[..m], &a[..m]))
        })
        .ok_or(Error::NoInteriorPoint)?;
    Ok(best[..m].to_vec())
}

/// Γ in both descriptions, with per-generator incidence sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma {
    pub h: PolyhedronH,
    pub v: PolyhedronV,
    normalized: Vec<(Vec<f64>, f64)>,
    vertex_inc: Vec<Vec<bool>>,
    ray_inc: Vec<Vec<bool>>,
}

impl Gamma {
    pub fn new(h: PolyhedronH, v: PolyhedronV) -> Self {
        let normalized: Vec<(Vec<f64>, f64)> = h.rows.iter().map(|r| r.normalized()).collect();
        let vertex_inc = v
            .vertices
            .iter()
            .map(|g| normalized.iter().map(|(a, b)| (dot(a, g) + b).abs() <= FACE_TOL).collect())
            .collect();
        let ray_inc = v
            .rays
            .iter()
            .map(|r| normalized.iter().map(|(a, _)| dot(a, r).abs() <= FACE_TOL).collect())
            .collect();
        Self { h, v, normalized, vertex_inc, ray_inc }
    }

    pub fn from_h(h: PolyhedronH) -> Result<Self> {
        let v = dd_vrep(&h)?;
        Ok(Self::new(h, v))
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Value of normalized row `i` at `γ`.
    pub fn row_value(&self, i: usize, gamma: &[f64]) -> f64 {
        let (a, b) = &self.normalized[i];
        dot(a, gamma) + b
    }

    /// Smallest face containing the given generators.
    pub fn face_of(&self, vertices: &[usize], rays: &[usize]) -> Face {
        let nrows = self.h.rows.len();
        let active: Vec<usize> = (0..nrows)
            .filter(|&i| {
                vertices.iter().all(|&g| self.vertex_inc[g][i])
                    && rays.iter().all(|&r| self.ray_inc[r][i])
            })
            .collect();
        self.face_with_active(active)
    }

    /// The face cut out by the given active rows: every generator binding on
    /// all of them.
    fn face_with_active(&self, active: Vec<usize>) -> Face {
        let vertices: Vec<usize> = (0..self.v.vertices.len())
            .filter(|&g| active.iter().all(|&i| self.vertex_inc[g][i]))
            .collect();
        let rays: Vec<usize> = (0..self.v.rays.len())
            .filter(|&r| active.iter().all(|&i| self.ray_inc[r][i]))
            .collect();
        let aff_dim = self.aff_dim(&vertices, &rays);
        Face { active_rows: active, vertices, rays, aff_dim }
    }

    fn aff_dim(&self, vertices: &[usize], rays: &[usize]) -> usize {
        let pts: Vec<DVector<f64>> =
            vertices.iter().map(|&g| DVector::from_column_slice(&self.v.vertices[g])).collect();
        let dirs: Vec<DVector<f64>> =
            rays.iter().map(|&r| DVector::from_column_slice(&self.v.rays[r])).collect();
        linalg::affine_rank(&pts, &dirs, RANK_TOL)
    }

    /// Γ itself as a face.
    pub fn whole(&self) -> Face {
        let all_v: Vec<usize> = (0..self.v.vertices.len()).collect();
        let all_r: Vec<usize> = (0..self.v.rays.len()).collect();
        self.face_of(&all_v, &all_r)
    }

    /// Maximizes `γ ↦ q(γ, x) = q_0(x) + Σ γ_i q_i(x)` over Γ.
    ///
    /// `tol` is relative to the magnitude of the values involved.
    pub fn optimal_face(&self, p: &Qcqp, x: &DVector<f64>, tol: f64) -> Result<OptimalFace> {
        if self.is_empty() {
            return Err(Error::MissingAssumption("the multiplier set is empty".into()));
        }
        if x.len() != p.dimension() {
            return Err(Error::DimensionMismatch { expected: p.dimension(), found: x.len() });
        }
        let q0 = p.objective().value(x);
        let qx = p.constraint_values(x);
        let scale = qx.iter().fold(q0.abs().max(1.0), |m, v| m.max(v.abs()));
        let tol_abs = tol * scale;

        let ray_vals: Vec<f64> = self.v.rays.iter().map(|r| dot(r, &qx)).collect();
        if ray_vals.iter().any(|v| *v > tol_abs) {
            return Ok(OptimalFace::UnboundedAbove);
        }
        let vertex_vals: Vec<f64> = self.v.vertices.iter().map(|g| q0 + dot(g, &qx)).collect();
        let sup = vertex_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let verts: Vec<usize> =
            (0..vertex_vals.len()).filter(|&i| vertex_vals[i] >= sup - tol_abs).collect();
        let rays: Vec<usize> = (0..ray_vals.len()).filter(|&i| ray_vals[i].abs() <= tol_abs).collect();
        let face = self.face_of(&verts, &rays);
        Ok(OptimalFace::Bounded { sup, face })
    }

    /// All nonempty faces, each once, ordered by affine dimension.
    pub fn enumerate_faces(&self) -> Result<Vec<Face>> {
        let nrows = self.h.rows.len();
        if nrows > MAX_FACE_ROWS {
            return Err(Error::GuardExceeded { what: "H-rows", value: nrows, limit: MAX_FACE_ROWS });
        }
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let whole = self.whole();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(whole.active_rows.clone());
        queue.push_back(whole);
        while let Some(face) = queue.pop_front() {
            for j in 0..nrows {
                if face.active_rows.contains(&j) {
                    continue;
                }
                let verts: Vec<usize> =
                    face.vertices.iter().copied().filter(|&g| self.vertex_inc[g][j]).collect();
                if verts.is_empty() {
                    continue;
                }
                let rays: Vec<usize> =
                    face.rays.iter().copied().filter(|&r| self.ray_inc[r][j]).collect();
                let sub = self.face_of(&verts, &rays);
                if seen.insert(sub.active_rows.clone()) {
                    queue.push_back(sub);
                }
            }
            out.push(face);
        }
        out.sort_by(|a, b| {
            a.aff_dim
                .cmp(&b.aff_dim)
                .then_with(|| a.vertices.cmp(&b.vertices))
                .then_with(|| a.rays.cmp(&b.rays))
        });
        Ok(out)
    }

    /// A relative-interior point: mean of the face's vertices plus the sum of
    /// its rays.
    pub fn relint_point(&self, face: &Face) -> Vec<f64> {
        let m = self.dim();
        let mut g = vec![0.0; m];
        let nv = face.vertices.len().max(1) as f64;
        for &i in &face.vertices {
            for (k, v) in self.v.vertices[i].iter().enumerate() {
                g[k] += v / nv;
            }
        }
        for &r in &face.rays {
            for (k, v) in self.v.rays[r].iter().enumerate() {
                g[k] += v;
            }
        }
        g
    }

    /// Definite/semidefinite classification of a face, with `V(F)` and the
    /// affine dimension of `b` over the face in the semidefinite case.
    pub fn classify_face(&self, face: &Face, p: &Qcqp, diag: &SimDiag) -> FaceClass {
        let dead: Vec<usize> = face
            .active_rows
            .iter()
            .filter_map(|&i| match self.h.rows[i].origin {
                RowOrigin::Eigenvalue(j) => Some(j),
                RowOrigin::Sign(_) => None,
            })
            .collect();
        if dead.is_empty() {
            return FaceClass::Definite { witness: self.relint_point(face) };
        }
        let cols: Vec<DVector<f64>> = dead.iter().map(|&j| diag.basis.column(j).into_owned()).collect();
        let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let basis_vecs = linalg::orthonormal_basis(&cols, 1e-12 * scale);
        let basis = DMatrix::from_columns(&basis_vecs);
        FaceClass::Semidefinite { basis, b_aff_dim: self.b_aff_dim(face, p) }
    }

    /// `aff dim {b(γ) : γ ∈ F}`.
    pub fn b_aff_dim(&self, face: &Face, p: &Qcqp) -> usize {
        let pts: Vec<DVector<f64>> =
            face.vertices.iter().map(|&g| p.linear_part(&self.v.vertices[g])).collect();
        let dirs: Vec<DVector<f64>> =
            face.rays.iter().map(|&r| p.linear_part_direction(&self.v.rays[r])).collect();
        linalg::affine_rank(&pts, &dirs, RANK_TOL)
    }
}

/// Searches for `γ` with `A(γ) ≻ 0` and `γ_i ≥ 0` on inequalities: first
/// `γ = 0`, then single-constraint multiples on a logarithmic grid.
pub fn find_definite_multiplier(p: &Qcqp) -> Option<Vec<f64>> {
    let m = p.num_constraints();
    let is_pd = |g: &[f64]| {
        matches!(
            linalg::psd_status(&p.hessian(g), linalg::PSD_TOL),
            Ok(DefinitenessStatus::PositiveDefinite)
        )
    };
    let zero = vec![0.0; m];
    if is_pd(&zero) {
        return Some(zero);
    }
    for i in 0..m {
        let signs: &[f64] = if p.is_inequality(i + 1) { &[1.0] } else { &[1.0, -1.0] };
        for s in signs {
            for e in -12..=12 {
                let mut g = vec![0.0; m];
                g[i] = s * 10f64.powf(e as f64 / 4.0);
                if is_pd(&g) {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// Everything derived from the dual side of a problem: a diagonalizing
/// congruence, Γ in both descriptions and a strictly feasible multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct DualModel {
    pub diag: SimDiag,
    pub gamma: Gamma,
    pub gamma_star: Vec<f64>,
}

impl DualModel {
    pub fn new(p: &Qcqp) -> Result<Self> {
        let diag = match find_definite_multiplier(p) {
            Some(g) => linalg::whiten_simdiag(p, &g)?,
            None => linalg::orthogonal_simdiag(p).map_err(|e| match e {
                // without a definite multiplier the whitening route is closed
                Error::NotSimultaneouslyDiagonalizable => Error::NoInteriorPoint,
                other => other,
            })?,
        };
        let h = build_gamma(p, &diag);
        let gamma_star = find_gamma_star(&h)?;
        let gamma = Gamma::from_h(h)?;
        Ok(Self { diag, gamma, gamma_star })
    }

    pub fn optimal_face(&self, p: &Qcqp, x: &DVector<f64>, tol: f64) -> Result<OptimalFace> {
        self.gamma.optimal_face(p, x, tol)
    }

    pub fn classify_face(&self, face: &Face, p: &Qcqp) -> FaceClass {
        self.gamma.classify_face(face, p, &self.diag)
    }
}
