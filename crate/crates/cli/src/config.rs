//! Flag handling: merges command-line overrides into a program document and
//! validates the result.

use clap::Args;
use qci_core::cone::ProgramSpec;
use qci_core::io::{ProgramDoc, TpModeName};
use qci_core::solver::{SolveParams, StepRule};
use qci_core::Matrix;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct SolveFlags {
    /// Cone for `--method cone`: psd, sep, ru or hull.
    #[arg(long)]
    pub cone: Option<String>,
    /// JSON file with hull generators, either a list of matrices or
    /// `{"generators": [...]}`.
    #[arg(long)]
    pub generators: Option<std::path::PathBuf>,
    /// Penalty weight on the trace-preservation defect.
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub trace_cap: Option<f64>,
    /// penalty, exact or unconstrained.
    #[arg(long)]
    pub tp_mode: Option<String>,
    #[arg(long)]
    pub feas_tol: Option<f64>,
    #[arg(long)]
    pub lmo_restarts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// fully-corrective or line-search.
    #[arg(long)]
    pub step_rule: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GeneratorsFile {
    List(Vec<Matrix>),
    Doc { generators: Vec<Matrix> },
}

pub fn parse_generators(text: &str) -> Result<Vec<Matrix>, CliError> {
    match serde_json::from_str::<GeneratorsFile>(text).map_err(CliError::json)? {
        GeneratorsFile::List(g) | GeneratorsFile::Doc { generators: g } => Ok(g),
    }
}

fn parse_step_rule(s: &str) -> Result<StepRule, CliError> {
    match s {
        "fully-corrective" => Ok(StepRule::FullyCorrective),
        "line-search" => Ok(StepRule::LineSearch),
        other => Err(CliError::Usage(format!("unknown step rule '{other}'"))),
    }
}

/// Applies flag overrides to the program JSON and builds the validated
/// program and solver parameters. Defaults for `w`, `trace_cap`, `feas_tol`
/// and restarts are those of the library.
pub fn validate_config(
    flags: &SolveFlags,
    mut doc: Value,
    generators: Option<Vec<Matrix>>,
    seed: Option<u64>,
) -> Result<(ProgramSpec, SolveParams), CliError> {
    let obj: &mut Map<String, Value> = doc
        .as_object_mut()
        .ok_or_else(|| CliError::Json("program file must hold a JSON object".into()))?;
    obj.remove("version");
    if let Some(c) = &flags.cone {
        c.parse::<qci_core::cone::ConeKind>().map_err(CliError::from_core)?;
        obj.insert("cone".into(), Value::String(c.clone()));
    }
    if !obj.contains_key("cone") {
        obj.insert("cone".into(), Value::String("psd".into()));
    }
    if let Some(m) = &flags.tp_mode {
        m.parse::<TpModeName>().map_err(CliError::from_core)?;
        obj.insert("tp_mode".into(), Value::String(m.clone()));
    }
    if let Some(w) = flags.w {
        obj.insert("w".into(), serde_json::json!(w));
    }
    if let Some(cap) = flags.trace_cap {
        obj.insert("trace_cap".into(), serde_json::json!(cap));
    }
    if let Some(r) = flags.lmo_restarts {
        obj.insert("lmo_restarts".into(), serde_json::json!(r));
    }
    if let Some(g) = generators {
        obj.insert("generators".into(), serde_json::to_value(g).expect("matrices serialize"));
    }
    if let Some(s) = seed {
        obj.insert("seed".into(), serde_json::json!(s));
    }
    let program: ProgramDoc = serde_json::from_value(doc).map_err(CliError::json)?;
    let spec = program.to_spec().map_err(CliError::from_core)?;

    let mut params = SolveParams {
        seed: program.seed,
        ..SolveParams::default()
    };
    if let Some(t) = flags.feas_tol {
        params.feas_tol = t;
    }
    if let Some(m) = flags.max_iter {
        params.max_iter = m;
    }
    if let Some(r) = &flags.step_rule {
        params.step_rule = parse_step_rule(r)?;
    }
    params.validate().map_err(CliError::from_core)?;
    Ok((spec, params))
}
