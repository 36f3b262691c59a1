//! Constructive cone membership: decompose a matrix into cone atoms.

use nalgebra::{DMatrix, DVector};

use crate::channel::ChoiMatrix;
use crate::cone::atom::{realize_sum, Atom, AtomPayload};
use crate::cone::program::{ConeKind, ConeSpec};
use crate::cone::witness::{pt_witness, PtWitness};
use crate::error::{Error, Result};
use crate::matrix::{jacobi_eigh, partial_trace, partial_transpose, Factor, Matrix};
use crate::solver::linalg::nnls;
use crate::solver::{run_engine, EngineOptions, MembershipObjective, StepRule};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct ConicDecomposition {
    pub atoms: Vec<Atom>,
    /// `‖Σ atoms − C‖_F`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipFailure {
    /// Best residual reached, or infinity when nothing was attempted.
    pub residual: f64,
    /// True when the matrix is proven to lie outside the cone.
    pub excluded: bool,
    pub reason: String,
}

fn excluded(reason: String) -> MembershipFailure {
    MembershipFailure {
        residual: f64::INFINITY,
        excluded: true,
        reason,
    }
}

fn finish(atoms: Vec<Atom>, c: &Matrix, cone: &ConeSpec, tol: f64) -> std::result::Result<ConicDecomposition, MembershipFailure> {
    let n = c.rows();
    let sum = if atoms.is_empty() {
        Matrix::zeros(n, n)
    } else {
        realize_sum(&atoms, cone)
    };
    let residual = (&sum - c).frobenius();
    if residual <= tol {
        Ok(ConicDecomposition { atoms, residual })
    } else {
        Err(MembershipFailure {
            residual,
            excluded: false,
            reason: format!("best residual {residual:.3e} above {tol:.1e}"),
        })
    }
}

/// Decomposes `c` into atoms of `cone` with `‖Σ atoms − c‖_F ≤ decomp_tol`.
/// Failure is inconclusive unless `excluded` is set.
pub fn membership_decompose(
    c: &Matrix,
    cone: &ConeSpec,
    budget: usize,
) -> std::result::Result<ConicDecomposition, MembershipFailure> {
    let tol = Tolerances::default();
    if cone.dims.check(c).is_err() {
        return Err(excluded(format!(
            "{}x{} matrix does not match the cone's {}⊗{} factors",
            c.rows(),
            c.cols(),
            cone.dims.d1,
            cone.dims.d2
        )));
    }
    if !c.is_hermitian(tol.herm * c.max_abs().max(1.0)) {
        return Err(excluded("matrix is not Hermitian".into()));
    }
    let c = c.hermitian_part();
    let e = jacobi_eigh(&c);
    let scale = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if e.min_value() < -tol.psd * scale {
        return Err(excluded(format!(
            "matrix is not PSD (eigenvalue {:.3e})",
            e.min_value()
        )));
    }
    let trace = c.trace().re;
    if trace <= tol.decomp {
        return finish(vec![], &c, cone, tol.decomp);
    }
    match cone.kind {
        ConeKind::Psd => {
            let atoms = (0..e.values.len())
                .filter(|&k| e.values[k] > 0.0)
                .map(|k| Atom::new(e.values[k], AtomPayload::Ray { v: e.vector(k) }))
                .collect();
            finish(atoms, &c, cone, tol.decomp)
        }
        ConeKind::Hull => {
            let gens = cone.generators();
            let target = c.hermitian_coords();
            let cols: Vec<Vec<f64>> = gens.iter().map(Matrix::hermitian_coords).collect();
            let a = DMatrix::from_fn(target.len(), cols.len(), |r, k| cols[k][r]);
            let b = DVector::from_vec(target);
            let p = nnls(&a, &b);
            let atoms = p
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(index, &w)| Atom::new(w, AtomPayload::Generator { index }))
                .collect();
            finish(atoms, &c, cone, tol.decomp)
        }
        ConeKind::Sep | ConeKind::Ru => {
            if cone.kind == ConeKind::Sep {
                let pt = partial_transpose(&c, Factor::Second, cone.dims).expect("dims checked");
                let lo = jacobi_eigh(&pt).min_value();
                if lo < -tol.psd * scale {
                    return Err(excluded(format!(
                        "partial transpose has eigenvalue {lo:.3e}"
                    )));
                }
            } else {
                // mixtures of unitary conjugations are unital and trace preserving up to scale
                let d = cone.dims.d1;
                let level = Matrix::identity(d).scale(trace / d as f64);
                for which in [Factor::First, Factor::Second] {
                    let t = partial_trace(&c, which, cone.dims).expect("dims checked");
                    let gap = (&t - &level).max_abs();
                    if gap > tol.tp * scale {
                        return Err(excluded(format!(
                            "partial traces are not proportional to the identity (gap {gap:.3e})"
                        )));
                    }
                }
            }
            let obj = MembershipObjective::new(c.clone(), cone.dims);
            let opts = EngineOptions {
                max_iter: budget.max(1),
                target: 1e-2 * tol.decomp,
                step_rule: StepRule::FullyCorrective,
                seed: cone.seed,
                cap: 2.0 * trace,
                refine: true,
            };
            let out = run_engine(&obj, cone, &opts);
            let atoms = out
                .atoms
                .into_iter()
                .map(|(p, q)| {
                    let tr = p.trace(cone);
                    Atom::new(q / tr, p)
                })
                .collect();
            finish(atoms, &c, cone, tol.decomp)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EbtClass {
    /// Separable Choi matrix: a product decomposition was found, or the
    /// partial transpose is PSD at dimensions where that suffices.
    Certified {
        decomposition: Option<ConicDecomposition>,
        by_ppt: bool,
    },
    /// Negative partial transpose; the witness separates it from every
    /// separable matrix.
    NotEbt {
        min_pt_eigenvalue: f64,
        witness: PtWitness,
    },
    Inconclusive { residual: f64 },
}

impl EbtClass {
    pub fn label(&self) -> &'static str {
        match self {
            EbtClass::Certified { .. } => "EBT-certified",
            EbtClass::NotEbt { .. } => "not-EBT",
            EbtClass::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Three-valued entanglement-breaking test for the Choi matrix of a map on
/// square matrices. Trace preservation is not checked here.
pub fn classify_ebt(c: &ChoiMatrix, budget: usize, seed: u64) -> Result<EbtClass> {
    let dims = c.dims();
    if dims.d1 != dims.d2 {
        return Err(Error::DimensionMismatch(format!(
            "separability cone needs equal factors, got {}⊗{}",
            dims.d1, dims.d2
        )));
    }
    let tol = Tolerances::default();
    let m = c.matrix();
    let pt = partial_transpose(m, Factor::Second, dims)?;
    let e = jacobi_eigh(&pt);
    let scale = e.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if e.min_value() < -tol.psd * scale {
        return Ok(EbtClass::NotEbt {
            min_pt_eigenvalue: e.min_value(),
            witness: pt_witness(m, dims)?,
        });
    }
    // PPT is sufficient at 2⊗2 and 2⊗3
    let ppt_exact = dims.d1.min(dims.d2) == 2 && dims.d1.max(dims.d2) <= 3;
    let cone = ConeSpec::new(ConeKind::Sep, dims, vec![])?.with_seed(seed);
    match membership_decompose(m, &cone, budget) {
        Ok(dec) => Ok(EbtClass::Certified {
            decomposition: Some(dec),
            by_ppt: ppt_exact,
        }),
        Err(_) if ppt_exact => Ok(EbtClass::Certified {
            decomposition: None,
            by_ppt: true,
        }),
        Err(f) => Ok(EbtClass::Inconclusive {
            residual: f.residual,
        }),
    }
}
