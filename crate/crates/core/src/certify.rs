//! Sufficient conditions for `conv(D) = D_SDP`.
//!
//! Every condition is evaluated, even after one passes, so the report shows
//! all guarantees that apply to an instance.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{self, DualModel, FaceClass, Gamma};
use crate::linalg::{self, KroneckerStructure};
use crate::problem::{EpigraphPoint, Qcqp, FEAS_TOL};

/// Relative tolerance for structural tests on the data (`b_i = 0`,
/// `A_i = α_i I`).
const STRUCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b { Verdict::Pass } else { Verdict::Fail }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One semidefinite face of Γ with the quantities compared by the theorems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub active_rows: Vec<usize>,
    pub aff_dim: usize,
    pub dim_v: usize,
    pub b_aff_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Dual strict feasibility: some admissible `γ*` with `A(γ*) ≻ 0`.
    pub assumption1: Verdict,
    pub gamma_star: Option<Vec<f64>>,
    /// Verdict on a user-supplied primal point, if any.
    pub primal_feasible: Option<bool>,
    /// Γ is polyhedral; known only when the Hessians diagonalize.
    pub assumption2: Verdict,
    /// `dim V(F) ≥ aff dim b(F) + 1` on every semidefinite face.
    pub theorem1: Verdict,
    /// `k ≥ aff dim b(F) + 1` on every semidefinite face.
    pub theorem2: Verdict,
    pub k: usize,
    pub num_faces: usize,
    pub semidefinite_faces: Vec<FaceRecord>,
    pub corollary_m1: Verdict,
    pub corollary_b0: Verdict,
    pub corollary_scaled_identity: Verdict,
    pub hull_guaranteed: bool,
    pub notes: Vec<String>,
}

/// Report together with the dual model when one could be built.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: ConditionReport,
    pub model: Option<DualModel>,
}

fn linear_terms_vanish(p: &Qcqp) -> bool {
    let scale = p.scale();
    p.constraints().iter().all(|q| q.b().amax() <= STRUCT_TOL * scale)
}

fn all_scaled_identity(p: &Qcqp) -> bool {
    let n = p.dimension();
    let scale = p.scale();
    p.quadratics().all(|q| {
        let a = q.a();
        let alpha = a[(0, 0)];
        (0..n).all(|i| (0..n).all(|j| {
            let target = if i == j { alpha } else { 0.0 };
            (a[(i, j)] - target).abs() <= STRUCT_TOL * scale
        }))
    })
}

/// Runs the whole dual pipeline and evaluates every condition.
///
/// `feasible_x` optionally supplies a primal point for the feasibility half of
/// the first assumption; without it the report carries a note instead.
pub fn analyze(p: &Qcqp, feasible_x: Option<&DVector<f64>>) -> Result<Analysis> {
    let kron = linalg::kron_multiplicity(p);
    let mut notes = Vec::new();

    let definite = gamma::find_definite_multiplier(p);
    let diag = match &definite {
        Some(g) => linalg::whiten_simdiag(p, g),
        None => linalg::orthogonal_simdiag(p),
    };
    let diagonalized = diag.is_ok();
    let model = match diag {
        Ok(diag) => {
            let h = gamma::build_gamma(p, &diag);
            match gamma::find_gamma_star(&h) {
                Ok(gamma_star) => {
                    let gamma = Gamma::from_h(h)?;
                    Some(DualModel { diag, gamma, gamma_star })
                }
                Err(Error::NoInteriorPoint) => {
                    notes.push("no multiplier makes every diagonal entry of A(γ) positive".into());
                    None
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::NotSimultaneouslyDiagonalizable) => {
            notes.push("Hessians are not simultaneously diagonalizable; polyhedrality of Γ is unknown".into());
            None
        }
        Err(e) => return Err(e),
    };

    let mut report = match &model {
        Some(m) => check_conditions(p, m, &kron)?,
        None => {
            let (a1, gamma_star) = match definite {
                Some(g) => (Verdict::Pass, Some(g)),
                None => (Verdict::Unknown, None),
            };
            let a2 = if diagonalized { Verdict::Pass } else { Verdict::Unknown };
            let a1 = if a2.passed() { Verdict::Fail } else { a1 };
            let mut r = ConditionReport {
                assumption1: a1,
                gamma_star,
                primal_feasible: None,
                assumption2: a2,
                theorem1: Verdict::Unknown,
                theorem2: Verdict::Unknown,
                k: kron.k,
                num_faces: 0,
                semidefinite_faces: Vec::new(),
                corollary_m1: Verdict::Unknown,
                corollary_b0: Verdict::Unknown,
                corollary_scaled_identity: Verdict::Unknown,
                hull_guaranteed: false,
                notes: Vec::new(),
            };
            if a1 == Verdict::Fail {
                r.corollary_m1 = Verdict::Fail;
                r.corollary_b0 = Verdict::Fail;
                r.corollary_scaled_identity = Verdict::Fail;
                r.theorem1 = Verdict::Fail;
                r.theorem2 = Verdict::Fail;
            } else if a1.passed() {
                r.corollary_m1 = Verdict::from_bool(p.num_constraints() == 1);
                r.corollary_scaled_identity =
                    Verdict::from_bool(all_scaled_identity(p) && p.num_constraints() <= p.dimension());
                if linear_terms_vanish(p) {
                    r.notes.push(
                        "all b_i vanish, but the zero-linear-term condition needs Γ to be polyhedral".into(),
                    );
                }
            }
            r.hull_guaranteed = r.corollary_m1.passed() || r.corollary_scaled_identity.passed();
            r
        }
    };
    report.notes.splice(0..0, notes);

    match feasible_x {
        Some(x) => {
            let t = p.objective().eval(x)? / 2.0;
            let rep = p.check_feasible(&EpigraphPoint::new(x.clone(), t), FEAS_TOL);
            report.primal_feasible = Some(rep.feasible);
            if !rep.feasible {
                report.notes.push("supplied primal point is infeasible".into());
            }
        }
        None => report
            .notes
            .push("primal feasibility was not checked (no feasible point supplied)".into()),
    }
    Ok(Analysis { report, model })
}

/// Evaluates every condition given a built dual model.
pub fn check_conditions(p: &Qcqp, model: &DualModel, kron: &KroneckerStructure) -> Result<ConditionReport> {
    let faces = model.gamma.enumerate_faces()?;
    let mut records = Vec::new();
    for f in &faces {
        if let FaceClass::Semidefinite { basis, b_aff_dim } = model.classify_face(f, p) {
            records.push(FaceRecord {
                active_rows: f.active_rows.clone(),
                aff_dim: f.aff_dim,
                dim_v: basis.ncols(),
                b_aff_dim,
            });
        }
    }
    let theorem1 = Verdict::from_bool(records.iter().all(|r| r.dim_v > r.b_aff_dim));
    let theorem2 = Verdict::from_bool(records.iter().all(|r| kron.k > r.b_aff_dim));
    let corollary_m1 = Verdict::from_bool(p.num_constraints() == 1);
    let corollary_b0 = Verdict::from_bool(linear_terms_vanish(p));
    let corollary_scaled_identity =
        Verdict::from_bool(all_scaled_identity(p) && p.num_constraints() <= p.dimension());
    let hull_guaranteed = [theorem1, theorem2, corollary_m1, corollary_b0, corollary_scaled_identity]
        .iter()
        .any(|v| v.passed());

    let mut notes = Vec::new();
    if p.num_equalities() > 0 && corollary_b0.passed() {
        notes.push("zero linear terms with equality constraints: relies on Γ being polyhedral, confirmed by diagonalization".into());
    }
    Ok(ConditionReport {
        assumption1: Verdict::Pass,
        gamma_star: Some(model.gamma_star.clone()),
        primal_feasible: None,
        assumption2: Verdict::Pass,
        theorem1,
        theorem2,
        k: kron.k,
        num_faces: faces.len(),
        semidefinite_faces: records,
        corollary_m1,
        corollary_b0,
        corollary_scaled_identity,
        hull_guaranteed,
        notes,
    })
}
