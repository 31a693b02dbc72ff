//! Shared helpers for integration tests: random relaxation points and an
//! independent sampled-hull oracle for two-dimensional instances.
#![allow(dead_code)]

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use qcqp_hull::hull::SocDescription;
use qcqp_hull::{EpigraphPoint, QuadraticFn, Qcqp};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn eval(q: &QuadraticFn, x: &DVector<f64>) -> f64 {
    q.eval(x).unwrap()
}

/// Points of the relaxation: `x` uniform in `[−r, r]^N` subject to every
/// homogeneous constraint, `2t = max_e g_e(x) + noise` with a quarter of the
/// points exactly on the boundary.
pub fn sample_dsdp(d: &SocDescription, r: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<EpigraphPoint> {
    let n = d.dimension();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 1000 * count, "relaxation has almost no points in the box");
        let x = DVector::from_fn(n, |_, _| rng.random_range(-r..r));
        if d.homogeneous.iter().any(|h| eval(h, &x) > 0.0) {
            continue;
        }
        let noise = if out.len() % 4 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
        out.push(EpigraphPoint::new(x.clone(), (d.objective(&x) + noise) / 2.0));
    }
    out
}

/// Plain coefficients of a two-variable quadratic for fast evaluation.
#[derive(Clone, Copy)]
struct Q2 {
    a: [f64; 3],
    b: [f64; 2],
    c: f64,
}

impl Q2 {
    fn new(q: &QuadraticFn) -> Self {
        let a = q.a();
        Q2 { a: [a[(0, 0)], a[(0, 1)], a[(1, 1)]], b: [q.b()[0], q.b()[1]], c: q.c() }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        self.a[0] * x * x + 2.0 * self.a[1] * x * y + self.a[2] * y * y + 2.0 * (self.b[0] * x + self.b[1] * y) + self.c
    }

    /// Real roots in `y` of `q(x, y) = 0` for fixed `x` (or in `x` when
    /// `swap`).
    fn line_roots(&self, fixed: f64, swap: bool) -> Vec<f64> {
        // q as a quadratic u² α + 2βu + γ in the free coordinate u
        let (al, be, ga) = if !swap {
            (self.a[2], self.a[1] * fixed + self.b[1], self.a[0] * fixed * fixed + 2.0 * self.b[0] * fixed + self.c)
        } else {
            (self.a[0], self.a[1] * fixed + self.b[0], self.a[2] * fixed * fixed + 2.0 * self.b[1] * fixed + self.c)
        };
        if al.abs() < 1e-14 {
            if be.abs() < 1e-14 {
                return vec![];
            }
            return vec![-ga / (2.0 * be)];
        }
        let disc = be * be - al * ga;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        vec![(-be - s) / al, (-be + s) / al]
    }
}

/// The sampled convex hull of the epigraph of a two-variable QCQP,
/// independent of any dual machinery.
///
/// Samples are a grid of feasible points plus points on every constraint
/// boundary found exactly along grid lines, each lifted to `t = q_0/2`. The
/// least `t` over the sampled hull at a query point is a small LP in the
/// supporting plane `(a, c)`, solved by constraint generation and refined
/// with denser local samples around the binding points.
pub struct HullOracle {
    obj: Q2,
    cons: Vec<(Q2, bool)>,
    samples: Vec<[f64; 3]>,
    polygon: Vec<[f64; 2]>,
    spacing: f64,
    lo: f64,
    hi: f64,
}

impl HullOracle {
    pub fn new(p: &Qcqp, lo: f64, hi: f64, grid: usize, lines: usize) -> Self {
        assert_eq!(p.dimension(), 2);
        let obj = Q2::new(p.objective());
        let cons = p.constraints().iter().enumerate().map(|(i, q)| (Q2::new(q), p.is_inequality(i + 1))).collect();
        let mut o = HullOracle { obj, cons, samples: Vec::new(), polygon: Vec::new(), spacing: (hi - lo) / grid as f64, lo, hi };
        let step = (hi - lo) / grid as f64;
        for i in 0..=grid {
            for j in 0..=grid {
                o.offer(lo + step * i as f64, lo + step * j as f64);
            }
        }
        let lstep = (hi - lo) / lines as f64;
        for i in 0..=lines {
            o.boundary_on_line(lo + lstep * i as f64);
        }
        o.polygon = convex_polygon(o.samples.iter().map(|s| [s[0], s[1]]).collect());
        o
    }

    fn feasible(&self, x: f64, y: f64, slack: f64) -> bool {
        self.cons.iter().all(|(q, ineq)| {
            let v = q.at(x, y);
            if *ineq { v <= slack } else { v.abs() <= slack }
        })
    }

    fn offer(&mut self, x: f64, y: f64) {
        if x < self.lo || x > self.hi || y < self.lo || y > self.hi {
            return;
        }
        if self.feasible(x, y, 1e-10) {
            self.samples.push([x, y, self.obj.at(x, y) / 2.0]);
        }
    }

    fn boundary_on_line(&mut self, fixed: f64) {
        let cons = self.cons.clone();
        for (q, _) in &cons {
            for r in q.line_roots(fixed, false) {
                self.offer(fixed, r);
            }
            for r in q.line_roots(fixed, true) {
                self.offer(r, fixed);
            }
        }
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    /// Whether `(x, y)` projects into the sampled hull, with signed margin.
    pub fn projects_inside(&self, x: f64, y: f64) -> bool {
        point_in_convex(&self.polygon, [x, y])
    }

    /// Least `t` with `(x, y, t)` in the sampled hull, or `None` when the
    /// point projects outside.
    pub fn tmin(&self, x: f64, y: f64) -> Option<f64> {
        self.lower(x, y, f64::NEG_INFINITY)
    }

    /// Membership of `(x, y, t)` in the sampled hull plus the upward ray.
    pub fn contains(&self, x: f64, y: f64, t: f64) -> bool {
        self.lower(x, y, t).is_some_and(|v| t >= v)
    }

    /// Envelope value at `(x, y)`, refined around binding samples until it
    /// drops to `stop` or the refinement budget is spent.
    fn lower(&self, x: f64, y: f64, stop: f64) -> Option<f64> {
        if !self.projects_inside(x, y) {
            return None;
        }
        let mut local: Vec<[f64; 3]> = Vec::new();
        if self.feasible(x, y, 1e-10) {
            local.push([x, y, self.obj.at(x, y) / 2.0]);
        }
        let mut seeds: Vec<[f64; 3]> = Vec::new();
        let mut h = self.spacing;
        let mut value = f64::INFINITY;
        for round in 0..4 {
            let (v, active) = self.envelope(x, y, &local, &seeds, stop);
            let gain = value - v;
            value = value.min(v);
            if value <= stop || round == 3 || gain <= 1e-9 * (1.0 + v.abs()) {
                break;
            }
            h /= 8.0;
            for s in &active {
                for i in -6..=6 {
                    let di = h * i as f64;
                    for j in -6..=6 {
                        let (px, py) = (s[0] + di, s[1] + h * j as f64);
                        if self.feasible(px, py, 1e-10) {
                            local.push([px, py, self.obj.at(px, py) / 2.0]);
                        }
                    }
                    for (q, _) in &self.cons {
                        for r in q.line_roots(s[0] + di, false) {
                            if self.feasible(s[0] + di, r, 1e-9) {
                                local.push([s[0] + di, r, self.obj.at(s[0] + di, r) / 2.0]);
                            }
                        }
                        for r in q.line_roots(s[1] + di, true) {
                            if self.feasible(r, s[1] + di, 1e-9) {
                                local.push([r, s[1] + di, self.obj.at(r, s[1] + di) / 2.0]);
                            }
                        }
                    }
                }
            }
            seeds = active;
        }
        Some(value)
    }

    /// `max a·(x,y) + c` s.t. `a·x_j + c ≤ t_j` over all samples, with the
    /// samples binding at the optimum. Every partial LP bounds the envelope
    /// from above, so the loop stops early once the value reaches `stop`.
    fn envelope(&self, x: f64, y: f64, extra: &[[f64; 3]], seeds: &[[f64; 3]], stop: f64) -> (f64, Vec<[f64; 3]>) {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let big = 1e4;
        let a0 = lp.add_var(x, (-big, big));
        let a1 = lp.add_var(y, (-big, big));
        let c = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let mut near = self.samples[0];
        let mut best = f64::INFINITY;
        for set in [&self.samples[..], extra] {
            for s in set {
                let dist = (s[0] - x) * (s[0] - x) + (s[1] - y) * (s[1] - y);
                if dist < best {
                    best = dist;
                    near = *s;
                }
            }
        }
        lp.add_constraint([(a0, near[0]), (a1, near[1]), (c, 1.0)], ComparisonOp::Le, near[2]);
        for s in seeds {
            lp.add_constraint([(a0, s[0]), (a1, s[1]), (c, 1.0)], ComparisonOp::Le, s[2]);
        }
        let mut sol = lp.solve().unwrap().into_solution().unwrap();
        for _ in 0..500 {
            let (va0, va1, vc) = (sol.var_value(a0), sol.var_value(a1), sol.var_value(c));
            if va0 * x + va1 * y + vc <= stop {
                return (va0 * x + va1 * y + vc, Vec::new());
            }
            let mut worst = -1e-11 * (1.0 + vc.abs());
            let mut arg = None;
            for set in [&self.samples[..], extra] {
                for s in set {
                    let slack = s[2] - va0 * s[0] - va1 * s[1] - vc;
                    if slack < worst {
                        worst = slack;
                        arg = Some(*s);
                    }
                }
            }
            let Some(s) = arg else { break };
            sol = sol
                .add_constraint([(a0, s[0]), (a1, s[1]), (c, 1.0)], ComparisonOp::Le, s[2])
                .unwrap()
                .into_solution()
                .unwrap();
        }
        let (va0, va1, vc) = (sol.var_value(a0), sol.var_value(a1), sol.var_value(c));
        let value = va0 * x + va1 * y + vc;
        let tol = 1e-9 * (1.0 + value.abs());
        let mut active = Vec::new();
        for set in [&self.samples[..], extra] {
            for s in set {
                if s[2] - va0 * s[0] - va1 * s[1] - vc <= tol {
                    active.push(*s);
                }
            }
        }
        // boundary arcs lying in one plane make many samples tie
        let dist = |s: &[f64; 3]| (s[0] - x).powi(2) + (s[1] - y).powi(2);
        active.sort_by(|a, b| dist(a).total_cmp(&dist(b)));
        active.truncate(16);
        (value, active)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain, counter-clockwise.
fn convex_polygon(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn point_in_convex(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    poly.len() >= 3
        && (0..poly.len()).all(|i| cross(poly[i], poly[(i + 1) % poly.len()], p) >= 0.0)
}

pub fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

/// Diagonal Hessians, `A_0 ≻ 0`, `b_i = 0` for every constraint and a
/// strictly feasible random point.
pub fn diagonal_zero_linear(n: usize, m: usize, seed: u64) -> Qcqp {
    let mut r = rng(seed);
    let x0 = DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0));
    let a0: Vec<f64> = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
    let b0 = DVector::from_fn(n, |_, _| r.random_range(-2.0..2.0));
    let q0 = QuadraticFn::new(diag(&a0), b0, 0.0).unwrap();
    let cons = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.5..1.5)).collect();
            let q = QuadraticFn::new(diag(&a), DVector::zeros(n), 0.0).unwrap();
            let c = -eval(&q, &x0) - r.random_range(0.5..3.0);
            QuadraticFn::new(diag(&a), DVector::zeros(n), c).unwrap()
        })
        .collect();
    Qcqp::new(q0, cons, m).unwrap()
}
