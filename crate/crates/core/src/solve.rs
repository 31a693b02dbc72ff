//! Minimizing `max_e g_e(x)` over the hull description by Kelley's cutting
//! plane method, and a brute-force oracle for the original QCQP.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::SocDescription;
use crate::problem::Qcqp;

pub const MAX_KELLEY_ITERS: usize = 10_000;
/// Points with every homogeneous constraint below this count as feasible
/// upper-bound candidates.
const CUT_FEAS_TOL: f64 = 1e-9;

/// An axis-aligned box `[lo_j, hi_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidParameters("box bounds must have equal positive length".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
            return Err(Error::InvalidParameters("box bounds must be finite with lo ≤ hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)))
    }

    pub fn clamp(&self, x: &mut DVector<f64>) {
        for j in 0..self.dim() {
            x[j] = x[j].clamp(self.lo[j], self.hi[j]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    /// The box is binding at the minimizer and the objective still decreases
    /// outward.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Minimum of `2t` over the hull within the box.
    pub value: f64,
    pub minimizer: DVector<f64>,
    pub lower_bound: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

fn lp_err(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::InfeasibleBox,
        other => Error::Lp(other.to_string()),
    }
}

/// Kelley's method on `min τ` s.t. linearizations of `g_e ≤ τ` and `h_r ≤ 0`.
pub fn minimize_soc(d: &SocDescription, bounds: &Bounds, tol: f64) -> Result<SolveResult> {
    let n = d.dimension();
    if bounds.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: bounds.dim() });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameters("tolerance must be positive".into()));
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let xs: Vec<Variable> = (0..n).map(|j| lp.add_var(0.0, (bounds.lo[j], bounds.hi[j]))).collect();
    let tau = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));

    // cut rows as (coefficients on x, coefficient on τ, rhs) for `≤`
    let cut = |f: &crate::problem::QuadraticFn, x: &DVector<f64>, with_tau: bool| {
        let gr = f.gradient(x);
        let rhs = gr.dot(x) - f.value(x);
        let mut expr: Vec<(Variable, f64)> = xs.iter().zip(gr.iter()).map(|(v, g)| (*v, *g)).collect();
        if with_tau {
            expr.push((tau, -1.0));
        }
        (expr, rhs)
    };

    let mut x = bounds.center();
    for g in &d.epigraph {
        let (e, r) = cut(g, &x, true);
        lp.add_constraint(e, ComparisonOp::Le, r);
    }
    for h in &d.homogeneous {
        if h.value(&x) > 0.0 {
            let (e, r) = cut(h, &x, false);
            lp.add_constraint(e, ComparisonOp::Le, r);
        }
    }
    let mut sol = lp.solve().map_err(lp_err)?.into_solution().map_err(|_| Error::Lp("interrupted".into()))?;

    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut status = SolveStatus::IterationLimit;
    while iterations < MAX_KELLEY_ITERS {
        iterations += 1;
        lower = lower.max(sol.objective());
        x = DVector::from_iterator(n, xs.iter().map(|v| sol.var_value(*v)));
        bounds.clamp(&mut x);
        let hmax = d.max_homogeneous(&x);
        let fx = d.objective(&x);
        if hmax <= CUT_FEAS_TOL && best.as_ref().is_none_or(|(b, _)| fx < *b) {
            best = Some((fx, x.clone()));
        }
        if let Some((b, _)) = &best {
            if b - lower <= tol * b.abs().max(1.0) {
                status = SolveStatus::Converged;
                break;
            }
        }
        let mut added = false;
        let (ge, _) = d
            .epigraph
            .iter()
            .map(|g| (g, g.value(&x)))
            .fold((None, f64::NEG_INFINITY), |acc, (g, v)| if v > acc.1 { (Some(g), v) } else { acc });
        let mut pending = Vec::new();
        if let Some(g) = ge {
            pending.push(cut(g, &x, true));
        }
        for h in &d.homogeneous {
            if h.value(&x) > CUT_FEAS_TOL {
                pending.push(cut(h, &x, false));
            }
        }
        for (e, r) in pending {
            sol = sol
                .add_constraint(e, ComparisonOp::Le, r)
                .map_err(lp_err)?
                .into_solution()
                .map_err(|_| Error::Lp("interrupted".into()))?;
            added = true;
        }
        if !added {
            break;
        }
    }
    let (value, minimizer) = best.ok_or(Error::InfeasibleBox)?;
    if status == SolveStatus::Converged && pushes_outward(d, bounds, &minimizer) {
        status = SolveStatus::Unbounded;
    }
    Ok(SolveResult { value, minimizer, lower_bound: lower, iterations, status })
}

/// True when the minimizer sits on the box boundary and the active piece of
/// the objective decreases across it without a binding homogeneous constraint.
fn pushes_outward(d: &SocDescription, bounds: &Bounds, x: &DVector<f64>) -> bool {
    if d.homogeneous.iter().any(|h| h.value(x) > -1e-6) {
        return false;
    }
    let fx = d.objective(x);
    let active: Vec<DVector<f64>> = d
        .epigraph
        .iter()
        .filter(|g| g.value(x) >= fx - 1e-6 * fx.abs().max(1.0))
        .map(|g| g.gradient(x))
        .collect();
    (0..bounds.dim()).any(|j| {
        let width = (bounds.hi[j] - bounds.lo[j]).max(1.0);
        let at_hi = bounds.hi[j] - x[j] <= 1e-9 * width;
        let at_lo = x[j] - bounds.lo[j] <= 1e-9 * width;
        (at_hi && active.iter().all(|g| g[j] < -1e-6)) || (at_lo && active.iter().all(|g| g[j] > 1e-6))
    })
}

/// Best feasible objective value found by sampling, with the point attaining
/// it.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    /// `min q_0(x)`, i.e. `2t`.
    pub value: f64,
    pub x: DVector<f64>,
}

const REFINE_CANDIDATES: usize = 16;
const MULTISTART: usize = 10_000;

/// Grid search (N ≤ 3) or random multistart, followed by penalty Newton
/// refinement of the best candidates.
pub fn brute_force(p: &Qcqp, bounds: &Bounds, grid_points: usize, seed: u64) -> Result<BruteForce> {
    let n = p.dimension();
    if bounds.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: bounds.dim() });
    }
    if grid_points < 2 {
        return Err(Error::InvalidParameters("at least two grid points per axis".into()));
    }
    let scale = p.scale();
    let spacing = (0..n).map(|j| (bounds.hi[j] - bounds.lo[j]) / (grid_points - 1) as f64).fold(0.0, f64::max);

    // (merit, feasible-on-grid, x)
    let mut cands: Vec<(f64, bool, DVector<f64>)> = Vec::new();
    let mut push = |x: DVector<f64>| {
        let q0 = p.objective().value(&x);
        let mut viol: f64 = 0.0;
        let mut grid_ok = true;
        for (i, q) in p.constraints().iter().enumerate() {
            let v = q.value(&x);
            let slack = spacing * q.gradient(&x).norm().max(1.0);
            if p.is_inequality(i + 1) {
                viol += v.max(0.0);
                grid_ok &= v <= 1e-12 * scale;
            } else {
                viol += v.abs();
                grid_ok &= v.abs() <= slack;
            }
        }
        let merit = if grid_ok { q0 } else { q0 + 1e3 * scale * viol };
        cands.push((merit, grid_ok, x));
        if cands.len() > 4 * REFINE_CANDIDATES {
            cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
            cands.truncate(REFINE_CANDIDATES);
        }
    };
    if n <= 3 {
        let total = grid_points.pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let x = DVector::from_fn(n, |j, _| {
                let k = rem % grid_points;
                rem /= grid_points;
                bounds.lo[j] + (bounds.hi[j] - bounds.lo[j]) * k as f64 / (grid_points - 1) as f64
            });
            push(x);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MULTISTART {
            let x = DVector::from_fn(n, |j, _| {
                if bounds.lo[j] == bounds.hi[j] { bounds.lo[j] } else { rng.random_range(bounds.lo[j]..bounds.hi[j]) }
            });
            push(x);
        }
    }
    cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
    cands.truncate(REFINE_CANDIDATES);

    let feas_tol = 1e-7 * scale;
    let feasible = |x: &DVector<f64>| {
        p.constraints().iter().enumerate().all(|(i, q)| {
            let v = q.value(x);
            if p.is_inequality(i + 1) { v <= feas_tol } else { v.abs() <= feas_tol }
        })
    };
    let mut best: Option<BruteForce> = None;
    let mut offer = |x: DVector<f64>| {
        if feasible(&x) {
            let v = p.objective().value(&x);
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(BruteForce { value: v, x });
            }
        }
    };
    for (_, grid_ok, x0) in cands {
        if grid_ok && p.num_equalities() == 0 {
            offer(x0.clone());
        }
        offer(refine(p, bounds, x0));
    }
    best.ok_or(Error::NoFeasiblePoint)
}

/// Quadratic penalty continuation with damped Newton steps, kept in the box.
fn refine(p: &Qcqp, bounds: &Bounds, mut x: DVector<f64>) -> DVector<f64> {
    let n = p.dimension();
    let mut rho = 10.0;
    while rho <= 1e12 {
        let merit = |x: &DVector<f64>| {
            let mut m = p.objective().value(x);
            for (i, q) in p.constraints().iter().enumerate() {
                let v = q.value(x);
                let v = if p.is_inequality(i + 1) { v.max(0.0) } else { v };
                m += rho * v * v;
            }
            m
        };
        for _ in 0..50 {
            let mut grad = p.objective().gradient(&x);
            let mut hess: DMatrix<f64> = p.objective().a() * 2.0;
            for (i, q) in p.constraints().iter().enumerate() {
                let v = q.value(&x);
                if p.is_inequality(i + 1) && v <= 0.0 {
                    continue;
                }
                let gq = q.gradient(&x);
                grad.axpy(2.0 * rho * v, &gq, 1.0);
                hess += (&gq * gq.transpose()) * (2.0 * rho) + q.a() * (4.0 * rho * v);
            }
            if grad.amax() <= 1e-14 * rho.max(1.0) {
                break;
            }
            let step = newton_step(&hess, &grad, n);
            let m0 = merit(&x);
            let mut a = 1.0;
            let mut moved = false;
            while a > 1e-12 {
                let mut y = &x - &step * a;
                bounds.clamp(&mut y);
                if merit(&y) < m0 {
                    x = y;
                    moved = true;
                    break;
                }
                a *= 0.5;
            }
            if !moved {
                break;
            }
        }
        rho *= 10.0;
    }
    x
}

fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>, n: usize) -> DVector<f64> {
    let scale = hess.amax().max(1.0);
    let mut shift = 0.0;
    loop {
        let h = hess + DMatrix::identity(n, n) * shift;
        if let Some(ch) = h.cholesky() {
            return ch.solve(grad);
        }
        shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
        if shift > 1e6 * scale {
            return grad / scale;
        }
    }
}
