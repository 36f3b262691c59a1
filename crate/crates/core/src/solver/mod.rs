//! Frank–Wolfe solver for the cone programs, plus independent oracles.

mod engine;
pub(crate) mod linalg;
pub mod lp;
pub(crate) mod objective;
pub mod ppt;
pub(crate) mod refine;

use serde::{Deserialize, Serialize};

use crate::channel::{kraus_from_choi, ChoiMatrix, HolevoEnsemble, KrausChannel};
use crate::cone::atom::{realize_sum, Atom, AtomPayload};
use crate::cone::dual::{gamma_dual, DualParams};
use crate::cone::program::{
    objective_unchecked, ConeKind, ProgramSpec, Residual, TpMode,
};
use crate::error::{Error, Result};
use crate::matrix::{trace_norm, Matrix};
#[cfg(test)]
use crate::cone::program::InterpolationProblem;
use crate::solver::linalg::lstsq;

pub use lp::{lp_oracle, LpOutcome};
pub use ppt::{ppt_constrained_oracle, PptReport};

pub(crate) use engine::{run as run_engine, EngineOptions};
pub(crate) use objective::{InterpObjective, MembershipObjective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// Re-optimize all active weights after each oracle call.
    FullyCorrective,
    /// Classic step toward the new vertex with an exact line search.
    LineSearch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveParams {
    pub max_iter: usize,
    pub feas_tol: f64,
    pub step_rule: StepRule,
    pub seed: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            max_iter: 200,
            feas_tol: 1e-6,
            step_rule: StepRule::FullyCorrective,
            seed: 0,
        }
    }
}

impl SolveParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if !(self.feas_tol > 0.0) || !self.feas_tol.is_finite() {
            return Err(Error::InvalidInput(format!(
                "feas_tol must be positive, got {}",
                self.feas_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// An interpolant in the cone was constructed.
    Yes,
    /// An exact lower bound rules one out.
    No,
    /// Neither; the heuristic oracles may have fallen short.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Objective at `c`: interpolation error, plus `w·λ` in penalty mode.
    pub delta: f64,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub c: Matrix,
    pub atoms: Vec<Atom>,
    pub residuals: Vec<Residual>,
    /// Best value after each outer iteration; nonincreasing.
    pub history: Vec<f64>,
    pub channel: Option<KrausChannel>,
    /// Largest proven lower bound on the program's optimal value.
    pub lower_bound: f64,
    pub verdict: Verdict,
}

impl SolveReport {
    /// Measure-and-prepare form from product atoms, if all atoms are products.
    pub fn holevo(&self) -> Option<HolevoEnsemble> {
        let mut pairs = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            match &a.payload {
                AtomPayload::Product { output, input } => {
                    pairs.push((output.clone(), input.transpose().scale(a.weight)))
                }
                _ => return None,
            }
        }
        HolevoEnsemble::new(pairs).ok()
    }
}

pub fn solve(spec: &ProgramSpec, params: &SolveParams) -> Result<SolveReport> {
    params.validate()?;
    let obj = InterpObjective::for_spec(spec);
    let opts = EngineOptions {
        max_iter: params.max_iter,
        target: 1e-2 * params.feas_tol,
        step_rule: params.step_rule,
        seed: params.seed,
        cap: spec.trace_cap,
        refine: true,
    };
    let out = run_engine(&obj, &spec.cone, &opts);
    let atoms: Vec<Atom> = out
        .atoms
        .into_iter()
        .map(|(p, q)| {
            let tr = p.trace(&spec.cone);
            Atom::new(q / tr, p)
        })
        .collect();
    let c = if atoms.is_empty() {
        let n = spec.cone.dims.total();
        Matrix::zeros(n, n)
    } else {
        realize_sum(&atoms, &spec.cone)
    };
    let ov = objective_unchecked(&c, spec);
    let tol = params.feas_tol;
    let feasible = match spec.tp_mode {
        TpMode::Penalty { .. } | TpMode::Exact => ov.value <= tol && ov.lambda <= tol,
        TpMode::Unconstrained => ov.value <= tol,
    };
    let mut history = out.history;
    // the report's value is recomputed from the atoms; keep the trace monotone
    if let Some(last) = history.last_mut() {
        *last = last.min(ov.value);
    }
    let lower_bound = if feasible { 0.0 } else { lower_bound(spec) };
    let verdict = if feasible {
        Verdict::Yes
    } else if lower_bound > tol {
        Verdict::No
    } else {
        Verdict::Unknown
    };
    let channel = if feasible {
        ChoiMatrix::new(c.hermitian_part(), spec.problem.out_dim(), spec.problem.in_dim())
            .and_then(|ch| kraus_from_choi(&ch))
            .ok()
    } else {
        None
    };
    Ok(SolveReport {
        delta: ov.value,
        lambda: ov.lambda,
        converged: feasible || out.iterations < params.max_iter,
        iterations: out.iterations,
        c,
        atoms,
        residuals: ov.residuals,
        history,
        channel,
        lower_bound,
        verdict,
    })
}

/// Lower bounds on the optimal value that hold exactly, whichever atoms the
/// heuristic oracles find.
pub fn lower_bound(spec: &ProgramSpec) -> f64 {
    let p = &spec.problem;
    let mut best = 0.0f64;
    let mass: f64 = p.x().iter().map(trace_norm).sum();
    let trace_gap: f64 = p
        .x()
        .iter()
        .zip(p.y())
        .map(|(x, y)| (y.trace().re - x.trace().re).abs())
        .sum();
    // a map with λ = ‖tr_1 C − I‖ moves tr X by at most λ‖X‖_tr
    match spec.tp_mode {
        TpMode::Penalty { w } => best = best.max(trace_gap / (mass / w).max(1.0)),
        TpMode::Exact => best = best.max(trace_gap),
        TpMode::Unconstrained => {}
    }
    if spec.cone.kind == ConeKind::Ru {
        best = best.max(unitality_bound(spec));
    }
    // every cone is inside the PSD cone, and the completely positive dual
    // bounds all of them
    let dual = gamma_dual(p, &DualParams::default());
    best.max(-dual.gamma)
}

/// Random-unitary maps send `I` to a multiple of `I`; if `Σ cᵢXᵢ = I` the data
/// then bound the objective below by `‖Σ cᵢYᵢ − I‖_tr`.
fn unitality_bound(spec: &ProgramSpec) -> f64 {
    let p = &spec.problem;
    let Some(c) = identity_coefficients(p.x()) else { return 0.0 };
    let d = p.out_dim();
    let mut s = Matrix::zeros(d, d);
    for (ci, y) in c.iter().zip(p.y()) {
        s.axpy(*ci, y);
    }
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if cmax == 0.0 {
        return 0.0;
    }
    let gap = trace_norm(&(&s - &Matrix::identity(d)));
    match spec.tp_mode {
        TpMode::Penalty { w } => gap / cmax.max(d as f64 / w),
        TpMode::Exact => gap / cmax,
        TpMode::Unconstrained => 0.0,
    }
}

/// Real coefficients with `Σ cᵢXᵢ = I`, if the identity is in the span.
pub(crate) fn identity_coefficients(x: &[Matrix]) -> Option<Vec<f64>> {
    use nalgebra::{DMatrix, DVector};
    let d = x[0].rows();
    let cols: Vec<Vec<f64>> = x.iter().map(|x| x.hermitian_coords()).collect();
    let target = Matrix::identity(d).hermitian_coords();
    let a = DMatrix::from_fn(target.len(), cols.len(), |r, c| cols[c][r]);
    let b = DVector::from_vec(target.clone());
    let c: Vec<f64> = lstsq(&a, &b).iter().copied().collect();
    let mut s = Matrix::zeros(d, d);
    for (ci, xi) in c.iter().zip(x) {
        s.axpy(*ci, xi);
    }
    ((&s - &Matrix::identity(d)).max_abs() <= 1e-12).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::program::ConeSpec;
    use crate::matrix::{tensor_product, BipartiteDims};
    use crate::random::{random_state, random_unitary, seeded};

    fn problem(x: Vec<Matrix>, y: Vec<Matrix>) -> InterpolationProblem {
        InterpolationProblem::new(x, y).unwrap()
    }

    fn assert_report(r: &SolveReport, spec: &ProgramSpec) {
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0], "history increased: {:?}", r.history);
        }
        let c = realize_sum(&r.atoms, &spec.cone);
        assert!((&c - &r.c).frobenius() <= 1e-8);
        let ov = objective_unchecked(&r.c, spec);
        assert!((ov.value - r.delta).abs() <= 1e-9);
    }

    #[test]
    fn identity_data_is_solved_over_psd() {
        let mut rng = seeded(81);
        let x: Vec<Matrix> = (0..3).map(|_| random_state(&mut rng, 2)).collect();
        let spec = ProgramSpec::with_defaults(
            problem(x.clone(), x),
            ConeSpec::psd(BipartiteDims::new(2, 2)),
        )
        .unwrap();
        let r = solve(&spec, &SolveParams::default()).unwrap();
        assert_report(&r, &spec);
        assert!(r.delta <= 1e-6, "{}", r.delta);
        assert_eq!(r.verdict, Verdict::Yes);
        assert!(r.channel.is_some());
    }

    #[test]
    fn replacement_data_is_solved_over_sep() {
        let mut rng = seeded(82);
        let rho = random_state(&mut rng, 2);
        let spec = ProgramSpec::with_defaults(
            problem(vec![Matrix::identity(2).scale(0.5)], vec![rho.clone()]),
            ConeSpec::new(ConeKind::Sep, BipartiteDims::new(2, 2), vec![]).unwrap(),
        )
        .unwrap();
        let r = solve(&spec, &SolveParams::default()).unwrap();
        assert_report(&r, &spec);
        assert!(r.delta <= 1e-6, "{}", r.delta);
        let h = r.holevo().unwrap();
        assert!((&h.apply(&Matrix::identity(2).scale(0.5)).unwrap() - &rho).max_abs() < 1e-6);
    }

    #[test]
    fn unitary_data_is_solved_over_ru() {
        let mut rng = seeded(83);
        let x1 = random_state(&mut rng, 2);
        let u = random_unitary(&mut rng, 2);
        let y1 = &(&u * &x1) * &u.adjoint();
        let spec = ProgramSpec::with_defaults(
            problem(vec![x1], vec![y1]),
            ConeSpec::new(ConeKind::Ru, BipartiteDims::new(2, 2), vec![]).unwrap(),
        )
        .unwrap();
        let r = solve(&spec, &SolveParams::default()).unwrap();
        assert_report(&r, &spec);
        assert!(r.delta <= 1e-6, "{}", r.delta);
    }

    #[test]
    fn trace_increase_is_certified_infeasible() {
        let spec = ProgramSpec::new(
            problem(
                vec![Matrix::from_diag(&[1.0, 0.0])],
                vec![Matrix::from_diag(&[2.0, 0.0])],
            ),
            ConeSpec::psd(BipartiteDims::new(2, 2)),
            TpMode::Exact,
            4.0,
        )
        .unwrap();
        let r = solve(&spec, &SolveParams::default()).unwrap();
        assert_report(&r, &spec);
        assert!(r.delta >= 1.0 - 1e-6, "{}", r.delta);
        assert_eq!(r.verdict, Verdict::No);
    }

    #[test]
    fn line_search_rule_is_monotone() {
        let mut rng = seeded(84);
        let x: Vec<Matrix> = (0..2).map(|_| random_state(&mut rng, 2)).collect();
        let y: Vec<Matrix> = (0..2).map(|_| random_state(&mut rng, 2)).collect();
        let spec = ProgramSpec::with_defaults(problem(x, y), ConeSpec::psd(BipartiteDims::new(2, 2)))
            .unwrap();
        let params = SolveParams {
            step_rule: StepRule::LineSearch,
            max_iter: 30,
            ..SolveParams::default()
        };
        let r = solve(&spec, &params).unwrap();
        assert_report(&r, &spec);
    }

    #[test]
    fn product_atoms_give_holevo_form() {
        let mut rng = seeded(85);
        let (r1, a1) = (random_state(&mut rng, 2), random_state(&mut rng, 2));
        let rep = SolveReport {
            delta: 0.0,
            lambda: 0.0,
            converged: true,
            iterations: 0,
            c: tensor_product(&r1, &a1).scale(2.0),
            atoms: vec![Atom::new(
                2.0,
                AtomPayload::Product {
                    output: r1.clone(),
                    input: a1.clone(),
                },
            )],
            residuals: vec![],
            history: vec![],
            channel: None,
            lower_bound: 0.0,
            verdict: Verdict::Yes,
        };
        let h = rep.holevo().unwrap();
        assert!((h.choi().matrix() - &rep.c).max_abs() < 1e-14);
    }
}
