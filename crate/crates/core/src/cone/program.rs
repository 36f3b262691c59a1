//! Interpolation programs over a cone of Choi matrices and their reduced objective.
//!
//! Eliminating the slack variables, a Choi matrix `C` costs
//! `w·‖tr_1 C − I‖_op + Σ ‖tr_2[C (I ⊗ Xᵢᵀ)] − Yᵢ‖_tr`; the optimal slacks are the
//! positive and negative parts of each residual.

use serde::{Deserialize, Serialize};

use crate::channel::apply_choi_raw;
use crate::error::{dim_err, Error, Result};
use crate::matrix::{
    check_psd, jacobi_eigh, norms_of_computed, partial_trace, BipartiteDims, Factor, Matrix,
};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationProblem {
    x: Vec<Matrix>,
    y: Vec<Matrix>,
}

impl InterpolationProblem {
    pub fn new(x: Vec<Matrix>, y: Vec<Matrix>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidInput("no input matrices".into()));
        }
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} inputs but {} outputs",
                x.len(),
                y.len()
            )));
        }
        let herm = Tolerances::default().herm;
        let (d, dp) = (x[0].rows(), y[0].rows());
        for (k, (xi, yi)) in x.iter().zip(&y).enumerate() {
            if !xi.is_square() || xi.rows() != d {
                return dim_err(format!("X[{k}] is {}x{}, expected {d}x{d}", xi.rows(), xi.cols()));
            }
            if !yi.is_square() || yi.rows() != dp {
                return dim_err(format!(
                    "Y[{k}] is {}x{}, expected {dp}x{dp}",
                    yi.rows(),
                    yi.cols()
                ));
            }
            xi.check_hermitian(herm)?;
            yi.check_hermitian(herm)?;
        }
        Ok(InterpolationProblem { x, y })
    }

    pub fn x(&self) -> &[Matrix] {
        &self.x
    }

    pub fn y(&self) -> &[Matrix] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn in_dim(&self) -> usize {
        self.x[0].rows()
    }

    pub fn out_dim(&self) -> usize {
        self.y[0].rows()
    }

    /// Output factor first.
    pub fn choi_dims(&self) -> BipartiteDims {
        BipartiteDims::new(self.out_dim(), self.in_dim())
    }

    /// `Σ ‖Yᵢ‖_tr`.
    pub fn output_mass(&self) -> f64 {
        self.y.iter().map(|y| norms_of_computed(y).trace_norm).sum()
    }

    /// `10·(d + Σ ‖Yᵢ‖_tr)`.
    pub fn default_w(&self) -> f64 {
        10.0 * (self.in_dim() as f64 + self.output_mass())
    }

    /// `2d`.
    pub fn default_trace_cap(&self) -> f64 {
        2.0 * self.in_dim() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Psd,
    Sep,
    Ru,
    Hull,
}

impl ConeKind {
    pub fn name(self) -> &'static str {
        match self {
            ConeKind::Psd => "psd",
            ConeKind::Sep => "sep",
            ConeKind::Ru => "ru",
            ConeKind::Hull => "hull",
        }
    }
}

impl std::str::FromStr for ConeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psd" => Ok(ConeKind::Psd),
            "sep" => Ok(ConeKind::Sep),
            "ru" => Ok(ConeKind::Ru),
            "hull" => Ok(ConeKind::Hull),
            other => Err(Error::InvalidInput(format!("unknown cone '{other}'"))),
        }
    }
}

pub const DEFAULT_LMO_RESTARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub dims: BipartiteDims,
    generators: Vec<Matrix>,
    pub lmo_restarts: usize,
    pub seed: u64,
}

impl ConeSpec {
    /// `dims` are the Choi dims, output factor first.
    pub fn new(kind: ConeKind, dims: BipartiteDims, generators: Vec<Matrix>) -> Result<Self> {
        let n = dims.total();
        match kind {
            ConeKind::Hull => {
                if generators.is_empty() {
                    return Err(Error::InvalidInput("hull cone needs generators".into()));
                }
                for (k, g) in generators.iter().enumerate() {
                    if !g.is_square() || g.rows() != n {
                        return dim_err(format!("generator {k} is {}x{}, expected side {n}", g.rows(), g.cols()));
                    }
                    check_psd(g, Tolerances::default().psd)?;
                    if g.trace().re <= 0.0 {
                        return Err(Error::InvalidInput(format!("generator {k} is zero")));
                    }
                }
            }
            ConeKind::Sep | ConeKind::Ru if dims.d1 != dims.d2 => {
                return dim_err(format!(
                    "{} cone needs square channels, got {}->{}",
                    kind.name(),
                    dims.d2,
                    dims.d1
                ));
            }
            _ => {}
        }
        let generators = if kind == ConeKind::Hull { generators } else { Vec::new() };
        Ok(ConeSpec {
            kind,
            dims,
            generators,
            lmo_restarts: DEFAULT_LMO_RESTARTS,
            seed: 0,
        })
    }

    pub fn psd(dims: BipartiteDims) -> Self {
        ConeSpec::new(ConeKind::Psd, dims, Vec::new()).expect("psd cone has no preconditions")
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.lmo_restarts = restarts.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TpMode {
    /// `w·‖tr_1 C − I‖_op` added to the objective.
    Penalty { w: f64 },
    /// `tr_1 C = I` as a constraint; `λ` is reported and checked separately.
    Exact,
    /// No trace condition: plain completely positive approximation.
    Unconstrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramSpec {
    pub problem: InterpolationProblem,
    pub cone: ConeSpec,
    pub tp_mode: TpMode,
    pub trace_cap: f64,
}

impl ProgramSpec {
    pub fn new(
        problem: InterpolationProblem,
        cone: ConeSpec,
        tp_mode: TpMode,
        trace_cap: f64,
    ) -> Result<Self> {
        if cone.dims != problem.choi_dims() {
            return dim_err(format!(
                "cone dims {}⊗{} do not match problem {}⊗{}",
                cone.dims.d1,
                cone.dims.d2,
                problem.out_dim(),
                problem.in_dim()
            ));
        }
        if let TpMode::Penalty { w } = tp_mode {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidInput(format!("penalty weight must be positive, got {w}")));
            }
        }
        let d = problem.in_dim() as f64;
        if !(trace_cap > d) || !trace_cap.is_finite() {
            return Err(Error::InvalidInput(format!(
                "trace cap must exceed d = {d}, got {trace_cap}"
            )));
        }
        Ok(ProgramSpec {
            problem,
            cone,
            tp_mode,
            trace_cap,
        })
    }

    /// Penalty mode with the default weight and trace cap.
    pub fn with_defaults(problem: InterpolationProblem, cone: ConeSpec) -> Result<Self> {
        let w = problem.default_w();
        let cap = problem.default_trace_cap();
        ProgramSpec::new(problem, cone, TpMode::Penalty { w }, cap)
    }

    /// Weight on `λ` used while optimizing. Exact mode enforces the constraint
    /// through the default penalty, which is exact for weights above the
    /// constraint's multiplier.
    pub fn penalty_weight(&self) -> f64 {
        match self.tp_mode {
            TpMode::Penalty { w } => w,
            TpMode::Exact => self.problem.default_w(),
            TpMode::Unconstrained => 0.0,
        }
    }
}

/// Optimal slacks for one data pair: `P − Q` is the residual, both PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub p: Matrix,
    pub q: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    /// `Σ ‖residualᵢ‖_tr`.
    pub interpolation: f64,
    /// `‖tr_1 C − I‖_op`.
    pub lambda: f64,
    pub residuals: Vec<Residual>,
}

pub fn objective(c: &Matrix, spec: &ProgramSpec) -> Result<ObjectiveValue> {
    let dims = spec.problem.choi_dims();
    if !c.is_square() || c.rows() != dims.total() {
        return dim_err(format!(
            "Choi matrix is {}x{}, expected side {}",
            c.rows(),
            c.cols(),
            dims.total()
        ));
    }
    c.check_hermitian(Tolerances::default().herm)?;
    Ok(objective_unchecked(c, spec))
}

pub(crate) fn objective_unchecked(c: &Matrix, spec: &ProgramSpec) -> ObjectiveValue {
    let p = &spec.problem;
    let (dout, din) = (p.out_dim(), p.in_dim());
    let mut interpolation = 0.0;
    let mut residuals = Vec::with_capacity(p.len());
    for (x, y) in p.x().iter().zip(p.y()) {
        let r = &apply_choi_raw(c, dout, din, x) - y;
        let e = jacobi_eigh(&r);
        interpolation += e.values.iter().map(|v| v.abs()).sum::<f64>();
        residuals.push(Residual {
            p: e.map(|v| v.max(0.0)),
            q: e.map(|v| (-v).max(0.0)),
        });
    }
    let lambda = tp_violation(c, dout, din);
    let value = match spec.tp_mode {
        TpMode::Penalty { w } => w * lambda + interpolation,
        TpMode::Exact | TpMode::Unconstrained => interpolation,
    };
    ObjectiveValue {
        value,
        interpolation,
        lambda,
        residuals,
    }
}

pub(crate) fn tp_violation(c: &Matrix, dout: usize, din: usize) -> f64 {
    let t = partial_trace(c, Factor::First, BipartiteDims::new(dout, din)).expect("side checked");
    norms_of_computed(&(&t - &Matrix::identity(din))).operator_norm
}
