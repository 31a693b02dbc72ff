//! Instance families: the worked two-dimensional example, generalized trust
//! region problems, quadratic matrix programs, Swiss-cheese distance problems
//! and joint-zero problems for quadratic forms.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{QuadraticFn, Qcqp};

/// A family together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Example1,
    /// One quadratic inequality in `ℝⁿ`.
    Gtrs { n: usize, seed: u64 },
    /// Vectorized matrix program over `ℝ^{n×k}` with `m` inequalities.
    QuadraticMatrixProgram { n: usize, k: usize, m: usize, seed: u64 },
    /// Distance from the origin to an intersection of `inside` balls, the
    /// complements of `outside` balls and `linear` half-spaces.
    SwissCheese { n: usize, inside: usize, outside: usize, linear: usize, seed: u64 },
    /// `min −xᵀx` over the unit ball with `xᵀF_ix = 0` for each form.
    Barvinok { forms: Vec<Vec<Vec<f64>>> },
}

pub fn generate(spec: &FamilySpec) -> Result<Qcqp> {
    match spec {
        FamilySpec::Example1 => Ok(example1()),
        FamilySpec::Gtrs { n, seed } => gtrs(*n, *seed),
        FamilySpec::QuadraticMatrixProgram { n, k, m, seed } => quadratic_matrix_program(*n, *k, *m, *seed),
        FamilySpec::SwissCheese { n, inside, outside, linear, seed } => {
            swiss_cheese(*n, *inside, *outside, *linear, *seed)
        }
        FamilySpec::Barvinok { forms } => {
            let mats = forms
                .iter()
                .map(|rows| {
                    let k = rows.len();
                    if rows.iter().any(|r| r.len() != k) {
                        return Err(Error::InvalidParameters("forms must be square".into()));
                    }
                    Ok(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
                })
                .collect::<Result<Vec<_>>>()?;
            barvinok(&mats)
        }
    }
}

fn diag2(a: f64, b: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(&[a, b]))
}

/// `min x₁² + x₂² + 10x₁` s.t. `x₁² − x₂² − 5 ≤ 0`, `−x₁² + x₂² − 50 ≤ 0`.
pub fn example1() -> Qcqp {
    let q0 = QuadraticFn::new(diag2(1.0, 1.0), DVector::from_column_slice(&[5.0, 0.0]), 0.0).unwrap();
    let q1 = QuadraticFn::new(diag2(1.0, -1.0), DVector::zeros(2), -5.0).unwrap();
    let q2 = QuadraticFn::new(diag2(-1.0, 1.0), DVector::zeros(2), -50.0).unwrap();
    Qcqp::new(q0, vec![q1, q2], 2).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Random invertible matrix with condition number kept moderate.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(n, n) * 1.5;
        let sv = m.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if lo > 0.0 && hi / lo < 50.0 {
            return m;
        }
    }
}

/// Random `A_0 ≻ 0` and indefinite `A_1`, with `c_1` chosen so a random
/// point is strictly feasible.
pub fn gtrs(n: usize, seed: u64) -> Result<Qcqp> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    let mut rng = rng(seed);
    loop {
        let s = random_symmetric(&mut rng, n);
        let lmin = linalg::sym_eig(&s, linalg::EIG_TOL)?.min();
        let a0 = s + DMatrix::identity(n, n) * (rng.random_range(0.5..2.0) - lmin);
        let b0 = random_vector(&mut rng, n) * 2.0;
        let a1 = random_symmetric(&mut rng, n) * 2.0;
        let b1 = random_vector(&mut rng, n);
        let x0 = random_vector(&mut rng, n);
        let q0 = QuadraticFn::new(a0, b0, 0.0)?;
        let mut q1 = QuadraticFn::new(a1, b1, 0.0)?;
        let slack = rng.random_range(0.5..3.0);
        q1 = QuadraticFn::new(q1.a().clone(), q1.b().clone(), -q1.value(&x0) - slack)?;
        let p = Qcqp::new(q0, vec![q1], 1)?;
        // the zero multiplier witnesses dual strict feasibility
        if matches!(
            linalg::psd_status(&p.hessian(&[0.0]), linalg::PSD_TOL)?,
            linalg::DefinitenessStatus::PositiveDefinite
        ) {
            return Ok(p);
        }
    }
}

/// `min tr(Xᵀ𝒜_0X) + 2⟨B_0, X⟩` subject to `tr(Xᵀ𝒜_iX) + 2⟨B_i, X⟩ + c_i ≤ 0`,
/// vectorized column-major so every Hessian is `I_k ⊗ 𝒜_i`.
///
/// The blocks are drawn simultaneously diagonalizable by congruence,
/// `𝒜_i = RᵀD_iR`, with `𝒜_0 ≻ 0`.
pub fn quadratic_matrix_program(n: usize, k: usize, m: usize, seed: u64) -> Result<Qcqp> {
    if n == 0 || k == 0 || m == 0 {
        return Err(Error::InvalidParameters("n, k and m must be positive".into()));
    }
    let mut rng = rng(seed);
    let r = random_invertible(&mut rng, n);
    let block = |d: DVector<f64>| r.transpose() * DMatrix::from_diagonal(&d) * &r;
    let x0 = random_vector(&mut rng, n * k);
    let mut quads = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let d = if i == 0 {
            DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0))
        } else {
            DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0))
        };
        let big_b = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
        // (b)_{(t−1)n+s} = B_{s,t}
        let b = DVector::from_column_slice(big_b.as_slice());
        let a = linalg::identity_kron(k, &block(d));
        let q = QuadraticFn::new(a, b, 0.0)?;
        let c = if i == 0 { 0.0 } else { -q.value(&x0) - rng.random_range(0.5..3.0) };
        quads.push(QuadraticFn::new(q.a().clone(), q.b().clone(), c)?);
    }
    let q0 = quads.remove(0);
    Qcqp::new(q0, quads, m)
}

/// `min ‖x‖²` over `‖x − y_i‖ ≤ s_i`, `‖x − z_i‖ ≥ r_i`, `⟨x, a_i⟩ ≥ β_i`,
/// all parameters drawn around a random point that satisfies every
/// constraint strictly.
pub fn swiss_cheese(n: usize, inside: usize, outside: usize, linear: usize, seed: u64) -> Result<Qcqp> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    if inside + outside + linear == 0 {
        return Err(Error::InvalidParameters("at least one constraint is required".into()));
    }
    let mut rng = rng(seed);
    let x0 = random_vector(&mut rng, n) * 2.0;
    let eye = DMatrix::identity(n, n);
    let mut cons = Vec::new();
    for _ in 0..inside {
        let y = &x0 + random_vector(&mut rng, n);
        let s = (&x0 - &y).norm() + rng.random_range(0.5..2.0);
        cons.push(QuadraticFn::new(eye.clone(), -&y, y.norm_squared() - s * s)?);
    }
    for _ in 0..outside {
        let z = &x0 + random_vector(&mut rng, n) * 2.0;
        let r = (&x0 - &z).norm() * rng.random_range(0.3..0.9);
        cons.push(QuadraticFn::new(-&eye, z.clone(), -z.norm_squared() + r * r)?);
    }
    for _ in 0..linear {
        let a = random_vector(&mut rng, n);
        let beta = a.dot(&x0) - rng.random_range(0.5..2.0);
        // ⟨x, a⟩ ≥ β  ⇔  −2⟨a/2, x⟩ + β ≤ 0
        cons.push(QuadraticFn::new(DMatrix::zeros(n, n), -&a * 0.5, beta)?);
    }
    Qcqp::new(QuadraticFn::scaled_identity(n, 1.0), cons, inside + outside + linear)
}

/// `min −xᵀx` s.t. `xᵀx − 1 ≤ 0` and `xᵀF_ix = 0`; the optimal value is `−1`
/// exactly when the forms have a joint nontrivial zero.
pub fn barvinok(forms: &[DMatrix<f64>]) -> Result<Qcqp> {
    let n = forms.first().map(|f| f.nrows()).ok_or_else(|| Error::InvalidParameters("no forms".into()))?;
    let mut cons = vec![QuadraticFn::new(DMatrix::identity(n, n), DVector::zeros(n), -1.0)?];
    for f in forms {
        if f.nrows() != n || f.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.nrows() });
        }
        cons.push(QuadraticFn::new(f.clone(), DVector::zeros(n), 0.0)?);
    }
    Qcqp::new(QuadraticFn::scaled_identity(n, -1.0), cons, 1)
}

/// Random diagonal forms with entries in `[−1, 1]`, as nested rows.
pub fn random_diagonal_forms(n: usize, count: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect()
        })
        .collect()
}
