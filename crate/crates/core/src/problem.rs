//! Problem data: quadratic functions, the QCQP itself and its epigraph.
//!
//! Every quadratic is stored as `q(x) = xᵀAx + 2bᵀx + c`. Note the factor 2 on
//! the linear term; the objective of the QCQP is measured as `2t` in the
//! epigraph so that `q_0(x) ≤ 2t`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-8;

/// Condition number above which an affine change of variables is rejected.
pub const MAX_CONDITION: f64 = 1e10;

/// A quadratic function `xᵀAx + 2bᵀx + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFn {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
}

impl QuadraticFn {
    /// Builds a quadratic, replacing `A` by its symmetric part.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if a.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
        }
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidProblem("non-finite coefficient".into()));
        }
        let a = (&a + a.transpose()) * 0.5;
        Ok(Self { a, b, c })
    }

    /// The zero quadratic on `ℝⁿ`.
    pub fn zero(n: usize) -> Self {
        Self { a: DMatrix::zeros(n, n), b: DVector::zeros(n), c: 0.0 }
    }

    /// `xᵀx`, scaled by `alpha`.
    pub fn scaled_identity(n: usize, alpha: f64) -> Self {
        Self { a: DMatrix::identity(n, n) * alpha, b: DVector::zeros(n), c: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Evaluates the quadratic at `x`.
    pub fn eval(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.value(x))
    }

    /// Evaluation without the dimension check.
    pub(crate) fn value(&self, x: &DVector<f64>) -> f64 {
        let ax = &self.a * x;
        x.dot(&ax) + 2.0 * self.b.dot(x) + self.c
    }

    /// `∇q(x) = 2(Ax + b)`.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (&self.a * x + &self.b) * 2.0
    }

    /// Restriction to the line `α ↦ q(x + αv)`, returned as `(a, β, c)` with
    /// `q(x + αv) = aα² + 2βα + c`.
    pub fn along_line(&self, x: &DVector<f64>, v: &DVector<f64>) -> (f64, f64, f64) {
        let av = &self.a * v;
        let quad = v.dot(&av);
        let lin = av.dot(x) + self.b.dot(v);
        (quad, lin, self.value(x))
    }

    /// `self + w · other`.
    pub fn add_scaled(&self, w: f64, other: &QuadraticFn) -> QuadraticFn {
        QuadraticFn {
            a: &self.a + &other.a * w,
            b: &self.b + &other.b * w,
            c: self.c + w * other.c,
        }
    }

    /// Largest absolute coefficient.
    pub fn magnitude(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .fold(self.c.abs(), |m, v| m.max(v.abs()))
    }

    /// True when `A` and `b` vanish up to `tol` (relative to `scale`).
    pub fn is_constant(&self, tol: f64) -> bool {
        linalg::max_abs(&self.a) <= tol && self.b.amax() <= tol
    }

    /// The lifted matrix `[[c, bᵀ], [b, A]]` of the Shor relaxation.
    pub fn shor_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut q = DMatrix::zeros(n + 1, n + 1);
        q[(0, 0)] = self.c;
        for i in 0..n {
            q[(0, i + 1)] = self.b[i];
            q[(i + 1, 0)] = self.b[i];
        }
        q.view_mut((1, 1), (n, n)).copy_from(&self.a);
        q
    }

    /// Reads `(A, b, c)` back from a lifted matrix.
    pub fn from_shor_matrix(q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() == 0 || q.nrows() != q.ncols() {
            return Err(Error::InvalidProblem("lifted matrix must be square and nonempty".into()));
        }
        let n = q.nrows() - 1;
        let a = q.view((1, 1), (n, n)).into_owned();
        let b = DVector::from_iterator(n, (0..n).map(|i| 0.5 * (q[(0, i + 1)] + q[(i + 1, 0)])));
        Self::new(a, b, q[(0, 0)])
    }
}

/// A QCQP `min q_0(x)` subject to `q_i(x) ≤ 0` for the first `m_I`
/// constraints and `q_i(x) = 0` for the remaining `m_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Qcqp {
    objective: QuadraticFn,
    constraints: Vec<QuadraticFn>,
    num_inequalities: usize,
}

impl Qcqp {
    pub fn new(
        objective: QuadraticFn,
        constraints: Vec<QuadraticFn>,
        num_inequalities: usize,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidProblem("at least one constraint is required".into()));
        }
        if num_inequalities > constraints.len() {
            return Err(Error::InvalidProblem(format!(
                "{} inequalities declared but only {} constraints given",
                num_inequalities,
                constraints.len()
            )));
        }
        let n = objective.dim();
        if n == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        for q in &constraints {
            if q.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: q.dim() });
            }
        }
        Ok(Self { objective, constraints, num_inequalities })
    }

    pub fn dimension(&self) -> usize {
        self.objective.dim()
    }

    /// `m = m_I + m_E`.
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_inequalities(&self) -> usize {
        self.num_inequalities
    }

    pub fn num_equalities(&self) -> usize {
        self.constraints.len() - self.num_inequalities
    }

    pub fn objective(&self) -> &QuadraticFn {
        &self.objective
    }

    pub fn constraints(&self) -> &[QuadraticFn] {
        &self.constraints
    }

    /// `q_i` for `i ∈ 0..=m`, index 0 being the objective.
    pub fn quadratic(&self, i: usize) -> &QuadraticFn {
        if i == 0 {
            &self.objective
        } else {
            &self.constraints[i - 1]
        }
    }

    /// All quadratics `q_0, …, q_m`.
    pub fn quadratics(&self) -> impl Iterator<Item = &QuadraticFn> {
        std::iter::once(&self.objective).chain(self.constraints.iter())
    }

    /// Whether constraint `i` (1-based) is an inequality.
    pub fn is_inequality(&self, i: usize) -> bool {
        (1..=self.num_inequalities).contains(&i)
    }

    fn check_multipliers(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.num_constraints() {
            return Err(Error::DimensionMismatch {
                expected: self.num_constraints(),
                found: gamma.len(),
            });
        }
        Ok(())
    }

    /// The Lagrangian quadratic `q(γ, ·) = q_0 + Σ γ_i q_i`.
    pub fn lagrangian(&self, gamma: &[f64]) -> Result<QuadraticFn> {
        self.check_multipliers(gamma)?;
        Ok(self.combine(&self.objective, gamma))
    }

    /// `Σ γ_i q_i` without the objective.
    pub fn constraint_combination(&self, gamma: &[f64]) -> Result<QuadraticFn> {
        self.check_multipliers(gamma)?;
        Ok(self.combine(&QuadraticFn::zero(self.dimension()), gamma))
    }

    fn combine(&self, base: &QuadraticFn, gamma: &[f64]) -> QuadraticFn {
        let mut acc = base.clone();
        for (w, q) in gamma.iter().zip(&self.constraints) {
            if *w != 0.0 {
                acc = acc.add_scaled(*w, q);
            }
        }
        acc
    }

    /// `A(γ) = A_0 + Σ γ_i A_i`.
    pub fn hessian(&self, gamma: &[f64]) -> DMatrix<f64> {
        let mut a = self.objective.a.clone();
        for (w, q) in gamma.iter().zip(&self.constraints) {
            a += &q.a * *w;
        }
        a
    }

    /// `b(γ) = b_0 + Σ γ_i b_i`.
    pub fn linear_part(&self, gamma: &[f64]) -> DVector<f64> {
        let mut b = self.objective.b.clone();
        for (w, q) in gamma.iter().zip(&self.constraints) {
            b += &q.b * *w;
        }
        b
    }

    /// `Σ γ_i b_i`, the linear part along a recession direction.
    pub fn linear_part_direction(&self, gamma: &[f64]) -> DVector<f64> {
        let mut b = DVector::zeros(self.dimension());
        for (w, q) in gamma.iter().zip(&self.constraints) {
            b += &q.b * *w;
        }
        b
    }

    /// Constraint values `q_1(x), …, q_m(x)`.
    pub fn constraint_values(&self, x: &DVector<f64>) -> Vec<f64> {
        self.constraints.iter().map(|q| q.value(x)).collect()
    }

    /// Largest coefficient magnitude over all quadratics, at least 1.
    pub fn scale(&self) -> f64 {
        self.quadratics().fold(1.0, |m, q| m.max(q.magnitude()))
    }

    /// Feasibility of an epigraph point.
    pub fn check_feasible(&self, pt: &EpigraphPoint, tol: f64) -> FeasReport {
        let values: Vec<f64> = if pt.x.len() == self.dimension() {
            self.constraint_values(&pt.x)
        } else {
            vec![f64::INFINITY; self.num_constraints()]
        };
        let violations: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(i, v)| if self.is_inequality(i + 1) { v.max(0.0) } else { v.abs() })
            .collect();
        let epigraph_gap = if pt.x.len() == self.dimension() {
            self.objective.value(&pt.x) - 2.0 * pt.t
        } else {
            f64::INFINITY
        };
        let feasible = violations.iter().all(|v| *v <= tol) && epigraph_gap <= tol;
        FeasReport { feasible, values, violations, epigraph_gap }
    }

    /// Change of variables `y = U(x + z)`: returns the problem in `y` whose
    /// quadratics satisfy `q'_i(U(x + z)) = q_i(x)`.
    pub fn affine_transform(&self, u: &DMatrix<f64>, z: &DVector<f64>) -> Result<Qcqp> {
        let n = self.dimension();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u.nrows().max(u.ncols()) });
        }
        if z.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: z.len() });
        }
        let sv = u.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if cond.is_nan() || cond > MAX_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
        let w = u.clone().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
        let map = |q: &QuadraticFn| -> QuadraticFn {
            // x = W y - z
            let az = &q.a * z;
            let a = w.transpose() * &q.a * &w;
            let b = w.transpose() * (&q.b - &az);
            let c = z.dot(&az) - 2.0 * q.b.dot(z) + q.c;
            QuadraticFn { a: (&a + a.transpose()) * 0.5, b, c }
        };
        Ok(Qcqp {
            objective: map(&self.objective),
            constraints: self.constraints.iter().map(map).collect(),
            num_inequalities: self.num_inequalities,
        })
    }
}

/// A point `(x, t)` of `ℝᴺ × ℝ`; the objective is compared against `2t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpigraphPoint {
    pub x: DVector<f64>,
    pub t: f64,
}

impl EpigraphPoint {
    pub fn new(x: DVector<f64>, t: f64) -> Self {
        Self { x, t }
    }

    pub fn from_slice(x: &[f64], t: f64) -> Self {
        Self { x: DVector::from_column_slice(x), t }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

/// Outcome of [`Qcqp::check_feasible`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasReport {
    pub feasible: bool,
    /// Raw constraint values `q_i(x)`.
    pub values: Vec<f64>,
    /// Positive part for inequalities, absolute value for equalities.
    pub violations: Vec<f64>,
    /// `q_0(x) − 2t`.
    pub epigraph_gap: f64,
}
