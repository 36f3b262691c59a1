//! JSON documents for channels, problems and solver reports.

use serde::{Deserialize, Serialize};

use crate::channel::{ChoiMatrix, KrausChannel};
use crate::cone::atom::Atom;
use crate::cone::program::{ConeKind, ConeSpec, InterpolationProblem, ProgramSpec, TpMode};
use crate::error::{Error, Result};
use crate::matrix::{BipartiteDims, Matrix};
use crate::solver::{SolveReport, Verdict};

/// A channel given by Kraus operators or by its Choi matrix (`dims` is
/// `[out_dim, in_dim]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelDoc {
    Kraus {
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<Matrix>,
    },
    Choi {
        choi: Matrix,
        dims: [usize; 2],
    },
}

impl ChannelDoc {
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        ChannelDoc::Kraus {
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
            kraus: ch.ops().to_vec(),
        }
    }

    pub fn from_choi(c: &ChoiMatrix) -> Self {
        ChannelDoc::Choi {
            choi: c.matrix().clone(),
            dims: [c.out_dim(), c.in_dim()],
        }
    }

    pub fn to_kraus(&self) -> Result<KrausChannel> {
        match self {
            ChannelDoc::Kraus {
                in_dim,
                out_dim,
                kraus,
            } => KrausChannel::new(*in_dim, *out_dim, kraus.clone()),
            ChannelDoc::Choi { .. } => self.to_choi()?.kraus(),
        }
    }

    pub fn to_choi(&self) -> Result<ChoiMatrix> {
        match self {
            ChannelDoc::Kraus { .. } => Ok(self.to_kraus()?.choi()),
            ChannelDoc::Choi { choi, dims } => ChoiMatrix::new(choi.clone(), dims[0], dims[1]),
        }
    }
}

/// Input of the orthogonal construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalProblemDoc {
    #[serde(rename = "A")]
    pub a: Vec<Matrix>,
    #[serde(rename = "B")]
    pub b: Vec<Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TpModeName {
    #[default]
    Penalty,
    Exact,
    Unconstrained,
}

impl std::str::FromStr for TpModeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "penalty" => Ok(TpModeName::Penalty),
            "exact" => Ok(TpModeName::Exact),
            "unconstrained" => Ok(TpModeName::Unconstrained),
            other => Err(Error::InvalidInput(format!("unknown tp mode '{other}'"))),
        }
    }
}

/// A cone program. Missing `w` and `trace_cap` take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramDoc {
    #[serde(rename = "X")]
    pub x: Vec<Matrix>,
    #[serde(rename = "Y")]
    pub y: Vec<Matrix>,
    pub cone: ConeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Matrix>>,
    #[serde(default)]
    pub tp_mode: TpModeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmo_restarts: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl ProgramDoc {
    pub fn problem(&self) -> Result<InterpolationProblem> {
        InterpolationProblem::new(self.x.clone(), self.y.clone())
    }

    /// Builds the program, filling defaults for `w`, `trace_cap` and restarts.
    pub fn to_spec(&self) -> Result<ProgramSpec> {
        let problem = self.problem()?;
        let dims: BipartiteDims = problem.choi_dims();
        let gens = match (self.cone, &self.generators) {
            (ConeKind::Hull, None) => {
                return Err(Error::InvalidInput("the hull cone needs generators".into()))
            }
            (ConeKind::Hull, Some(g)) => g.clone(),
            _ => vec![],
        };
        let mut cone = ConeSpec::new(self.cone, dims, gens)?.with_seed(self.seed);
        if let Some(r) = self.lmo_restarts {
            if r == 0 {
                return Err(Error::InvalidInput("lmo_restarts must be at least 1".into()));
            }
            cone = cone.with_restarts(r);
        }
        let tp_mode = match self.tp_mode {
            TpModeName::Penalty => TpMode::Penalty {
                w: self.w.unwrap_or_else(|| problem.default_w()),
            },
            TpModeName::Exact => TpMode::Exact,
            TpModeName::Unconstrained => TpMode::Unconstrained,
        };
        if self.tp_mode != TpModeName::Penalty && self.w.is_some() {
            return Err(Error::InvalidInput("w applies only to penalty mode".into()));
        }
        let cap = self.trace_cap.unwrap_or_else(|| problem.default_trace_cap());
        ProgramSpec::new(problem, cone, tp_mode, cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub delta: f64,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(rename = "C")]
    pub c: Matrix,
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelDoc>,
    pub lower_bound: f64,
    pub verdict: Verdict,
}

impl From<&SolveReport> for ReportDoc {
    fn from(r: &SolveReport) -> Self {
        ReportDoc {
            delta: r.delta,
            lambda: r.lambda,
            converged: r.converged,
            iterations: r.iterations,
            c: r.c.clone(),
            atoms: r.atoms.clone(),
            channel: r.channel.as_ref().map(ChannelDoc::from_kraus),
            lower_bound: r.lower_bound,
            verdict: r.verdict,
        }
    }
}

/// Serialized report; identical inputs give identical bytes.
pub fn report_json(r: &SolveReport) -> String {
    serde_json::to_string_pretty(&ReportDoc::from(r)).expect("reports serialize")
}
