//! Dense symmetric linear algebra.
//!
//! The eigensolver is a cyclic Jacobi iteration: slower than tridiagonal QR
//! but deterministic and accurate to working precision for the sizes used
//! here (`N ≤ 200`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problem::Qcqp;

/// Default relative off-diagonal tolerance for [`sym_eig`].
pub const EIG_TOL: f64 = 1e-14;
/// Default relative tolerance for [`psd_status`].
pub const PSD_TOL: f64 = 1e-9;
/// Relative kernel threshold used by [`solve_homogeneous`].
pub const KERNEL_TOL: f64 = 1e-9;
/// Relative tolerance for the pairwise commutator test.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Tolerance on off-diagonal entries after simultaneous diagonalization.
pub const DIAG_TOL: f64 = 1e-7;
/// Tolerance of the Kronecker block-equality test.
pub const KRON_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose()
    }
}

/// Definiteness of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DefinitenessStatus {
    PositiveDefinite,
    /// Positive semidefinite with a nontrivial kernel; columns are an
    /// orthonormal basis of it.
    PsdSingular(DMatrix<f64>),
    Indefinite,
}

/// `I_k ⊗ 𝒜_i` structure shared by all Hessians of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerStructure {
    /// Quadratic eigenvalue multiplicity.
    pub k: usize,
    /// One `n × n` factor per quadratic, `n = N / k`, index 0 the objective.
    pub factors: Vec<DMatrix<f64>>,
}

/// A congruence that diagonalizes every Hessian of a problem at once.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDiag {
    /// `P` with `Pᵀ A_i P` diagonal for every `i`.
    pub basis: DMatrix<f64>,
    /// `diag(Pᵀ A_i P)` for `i = 0..=m`.
    pub diagonals: Vec<DVector<f64>>,
}

impl SimDiag {
    pub fn dimension(&self) -> usize {
        self.basis.nrows()
    }

    /// `λ_j(γ) = d_j(A_0) + Σ γ_i d_j(A_i)`.
    pub fn eigenvalue(&self, j: usize, gamma: &[f64]) -> f64 {
        self.diagonals[0][j]
            + gamma
                .iter()
                .zip(&self.diagonals[1..])
                .map(|(g, d)| g * d[j])
                .sum::<f64>()
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `tol · ‖M‖_F`. Eigenvectors are sign-normalized so that their largest
/// entry is positive.
pub fn sym_eig(m: &DMatrix<f64>, tol: f64) -> Result<Spectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidProblem("non-finite matrix entry".into()));
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let fro = a.norm();

    let off_norm = |a: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for q in 0..n {
            for p in 0..n {
                if p != q {
                    s += a[(p, q)] * a[(p, q)];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = fro == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_norm(&a) <= tol * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + tau.hypot(1.0))
                } else {
                    -1.0 / (-tau + tau.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&a) > tol * fro {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        fix_sign_largest(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn fix_sign_largest(v: &mut DVector<f64>) {
    if let Some(i) = dominant_index(v) {
        if v[i] < 0.0 {
            v.neg_mut();
        }
    }
}

fn dominant_index(v: &DVector<f64>) -> Option<usize> {
    let amax = v.amax();
    if amax == 0.0 {
        return None;
    }
    v.iter().position(|x| x.abs() >= amax * (1.0 - 1e-12))
}

/// Flips `v` so that its first entry above `1e-9 · ‖v‖_∞` is positive.
pub fn fix_sign_first(v: &mut DVector<f64>) {
    let thresh = 1e-9 * v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() > thresh) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// Classifies `M` as definite, singular semidefinite or indefinite.
///
/// Eigenvalues are compared against `tol · max(1, ‖M‖_max)`.
pub fn psd_status(m: &DMatrix<f64>, tol: f64) -> Result<DefinitenessStatus> {
    let spec = sym_eig(m, EIG_TOL)?;
    let thresh = tol * max_abs(m).max(1.0);
    if spec.min() > thresh {
        return Ok(DefinitenessStatus::PositiveDefinite);
    }
    if spec.min() < -thresh {
        return Ok(DefinitenessStatus::Indefinite);
    }
    let cols: Vec<usize> = (0..m.nrows()).filter(|&j| spec.eigenvalues[j].abs() <= thresh).collect();
    let basis = spec.eigenvectors.select_columns(&cols);
    Ok(DefinitenessStatus::PsdSingular(basis))
}

/// A unit vector in the kernel of `E`, or `None` when `E` has full column
/// rank. The sign is fixed so the first nonzero entry is positive.
pub fn solve_homogeneous(e: &DMatrix<f64>) -> Option<DVector<f64>> {
    let q = e.ncols();
    if q == 0 {
        return None;
    }
    if max_abs(e) == 0.0 {
        let mut v = DVector::zeros(q);
        v[0] = 1.0;
        return Some(v);
    }
    let gram = e.transpose() * e;
    let spec = sym_eig(&gram, EIG_TOL).ok()?;
    let sigma_max = spec.max().max(0.0).sqrt();
    let mut v = spec.eigenvectors.column(0).into_owned();
    let residual = (e * &v).norm();
    if residual > KERNEL_TOL * sigma_max {
        return None;
    }
    v /= v.norm();
    fix_sign_first(&mut v);
    Some(v)
}

/// Orthonormal basis of `span(vectors)`, dropping directions whose residual
/// after projection is at most `tol` (absolute).
pub fn orthonormal_basis(vectors: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&w);
                w.axpy(-proj, b, 1.0);
            }
        }
        let nrm = w.norm();
        if nrm > tol {
            basis.push(w / nrm);
        }
    }
    basis
}

/// Linear rank of a set of vectors with an absolute residual threshold.
pub fn rank(vectors: &[DVector<f64>], tol: f64) -> usize {
    orthonormal_basis(vectors, tol).len()
}

/// Affine dimension of `points + cone(directions)`: the rank of the point
/// differences together with the directions. Returns 0 for a single point.
/// `rel_tol` is scaled by the largest input norm (at least 1).
pub fn affine_rank(points: &[DVector<f64>], directions: &[DVector<f64>], rel_tol: f64) -> usize {
    let scale = points.iter().chain(directions).map(|v| v.norm()).fold(1.0, f64::max);
    let mut vecs: Vec<DVector<f64>> = Vec::new();
    if let Some(first) = points.first() {
        vecs.extend(points[1..].iter().map(|p| p - first));
    }
    vecs.extend(directions.iter().cloned());
    rank(&vecs, rel_tol * scale)
}

/// Inverse square root of a positive definite matrix.
fn inv_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let spec = sym_eig(a, EIG_TOL)?;
    let thresh = PSD_TOL * max_abs(a).max(1.0);
    if spec.min() <= thresh {
        return Err(Error::MissingAssumption(
            "Lagrangian Hessian at the supplied multiplier is not positive definite".into(),
        ));
    }
    let d = spec.eigenvalues.map(|l| 1.0 / l.sqrt());
    let v = &spec.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&d) * v.transpose())
}

/// Orthonormal basis diagonalizing every matrix of a commuting symmetric
/// family, built by refining eigenspace clusters one matrix at a time.
pub fn common_eigenbasis(mats: &[DMatrix<f64>], cluster_tol: f64) -> Result<DMatrix<f64>> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut blocks: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
    for b in mats {
        let scale = max_abs(b).max(1.0);
        let mut refined = Vec::with_capacity(blocks.len());
        for q in blocks {
            if q.ncols() == 1 {
                refined.push(q);
                continue;
            }
            let restricted = q.transpose() * b * &q;
            let spec = sym_eig(&restricted, EIG_TOL)?;
            let r = q.ncols();
            let mut start = 0;
            for j in 1..=r {
                let split = j == r
                    || spec.eigenvalues[j] - spec.eigenvalues[j - 1] > cluster_tol * scale;
                if split {
                    let cols: Vec<usize> = (start..j).collect();
                    refined.push(&q * spec.eigenvectors.select_columns(&cols));
                    start = j;
                }
            }
        }
        blocks = refined;
    }
    let mut out = DMatrix::zeros(n, n);
    let mut col = 0;
    for q in &blocks {
        for j in 0..q.ncols() {
            out.set_column(col, &q.column(j));
            col += 1;
        }
    }
    Ok(out)
}

/// Whitens the Hessians by `A(γ*)^{-1/2}` and diagonalizes the resulting
/// family with a common orthogonal eigenbasis.
///
/// Fails with [`Error::NotSimultaneouslyDiagonalizable`] when two whitened
/// Hessians do not commute.
pub fn whiten_simdiag(p: &Qcqp, gamma_star: &[f64]) -> Result<SimDiag> {
    if gamma_star.len() != p.num_constraints() {
        return Err(Error::DimensionMismatch {
            expected: p.num_constraints(),
            found: gamma_star.len(),
        });
    }
    let w = inv_sqrt(&p.hessian(gamma_star))?;
    let whitened: Vec<DMatrix<f64>> = p.quadratics().map(|q| &w * q.a() * &w).collect();
    let q = commuting_basis(&whitened)?;
    finish_simdiag(p, &w * q)
}

/// Simultaneous diagonalization without whitening, valid when the Hessians
/// already commute. Used to locate a definite multiplier when `A_0` is not
/// itself definite.
pub fn orthogonal_simdiag(p: &Qcqp) -> Result<SimDiag> {
    let mats: Vec<DMatrix<f64>> = p.quadratics().map(|q| q.a().clone()).collect();
    let q = commuting_basis(&mats)?;
    finish_simdiag(p, q)
}

fn commuting_basis(mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let scale = mats.iter().map(max_abs).fold(1.0, f64::max);
    for i in 0..mats.len() {
        for j in (i + 1)..mats.len() {
            let comm = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            if max_abs(&comm) > COMMUTE_TOL * scale * scale {
                return Err(Error::NotSimultaneouslyDiagonalizable);
            }
        }
    }
    common_eigenbasis(mats, 1e-8)
}

fn finish_simdiag(p: &Qcqp, basis: DMatrix<f64>) -> Result<SimDiag> {
    let n = basis.nrows();
    // canonical column order: by position of the dominant entry
    let mut cols: Vec<(usize, usize, DVector<f64>)> = (0..n)
        .map(|j| {
            let mut c = basis.column(j).into_owned();
            fix_sign_largest(&mut c);
            (dominant_index(&c).unwrap_or(0), j, c)
        })
        .collect();
    cols.sort_by_key(|(dom, j, _)| (*dom, *j));
    let mut basis = DMatrix::zeros(n, n);
    for (dst, (_, _, c)) in cols.iter().enumerate() {
        basis.set_column(dst, c);
    }

    let mut diagonals = Vec::with_capacity(p.num_constraints() + 1);
    for q in p.quadratics() {
        let d = basis.transpose() * q.a() * &basis;
        let scale = max_abs(q.a()).max(1.0) * max_abs(&basis).max(1.0).powi(2);
        let mut off = d.clone();
        off.fill_diagonal(0.0);
        if max_abs(&off) > DIAG_TOL * scale {
            return Err(Error::NotSimultaneouslyDiagonalizable);
        }
        diagonals.push(d.diagonal());
    }
    Ok(SimDiag { basis, diagonals })
}

/// Largest `k` with `A_i = I_k ⊗ 𝒜_i` for every quadratic of `p`.
pub fn kron_multiplicity(p: &Qcqp) -> KroneckerStructure {
    let n_total = p.dimension();
    let mut divisors: Vec<usize> = (1..=n_total).filter(|k| n_total.is_multiple_of(*k)).collect();
    divisors.reverse();
    for k in divisors {
        let n = n_total / k;
        let mut factors = Vec::with_capacity(p.num_constraints() + 1);
        let mut ok = true;
        for q in p.quadratics() {
            let block = q.a().view((0, 0), (n, n)).into_owned();
            let tol = KRON_TOL * max_abs(q.a()).max(1.0);
            if !is_block_identity_kron(q.a(), &block, k, tol) {
                ok = false;
                break;
            }
            factors.push(block);
        }
        if ok {
            return KroneckerStructure { k, factors };
        }
    }
    unreachable!("k = 1 always satisfies the Kronecker test")
}

fn is_block_identity_kron(a: &DMatrix<f64>, block: &DMatrix<f64>, k: usize, tol: f64) -> bool {
    let n = block.nrows();
    for bi in 0..k {
        for bj in 0..k {
            for r in 0..n {
                for c in 0..n {
                    let expected = if bi == bj { block[(r, c)] } else { 0.0 };
                    if (a[(bi * n + r, bj * n + c)] - expected).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `I_k ⊗ block`.
pub fn identity_kron(k: usize, block: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::<f64>::identity(k, k).kronecker(block)
}
