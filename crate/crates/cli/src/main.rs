//! `qci`: interpolate, check, convert and witness quantum channels.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qci_core::channel::ChoiMatrix;
use qci_core::cone::{
    classify_ebt, gamma_dual, membership_decompose, projection_pair_search, pt_witness, ConeKind, ConeSpec,
    DualParams, EbtClass, InterpolationProblem,
};
use qci_core::io::{ChannelDoc, OrthogonalProblemDoc, ReportDoc};
use qci_core::matrix::{norms, Matrix};
use qci_core::orthogonal::{build_interpolator, validate_family};
use qci_core::solver::{solve, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use config::{parse_generators, validate_config, SolveFlags};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Data(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

impl CliError {
    fn json(e: serde_json::Error) -> Self {
        CliError::Json(e.to_string())
    }

    fn from_core(e: qci_core::Error) -> Self {
        match e {
            qci_core::Error::InvalidInput(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }

    /// sysexits codes: usage and configuration 64, bad data 65, missing
    /// input 66, unwritable output 73.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Json(_) => 64,
            CliError::Data(_) => 65,
            CliError::Read { .. } => 66,
            CliError::Write { .. } => 73,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qci", version, about = "Quantum channel interpolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a channel with Φ(Xᵢ) = Yᵢ.
    Interpolate {
        #[arg(long, value_enum, default_value_t = Method::Cone)]
        method: Method,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for all randomness; QCI_SEED takes precedence.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Classify a channel file.
    Check {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Outer iterations for decomposition searches.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Convert between Kraus and Choi channel files.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Target form; defaults to the other one.
        #[arg(long, value_enum)]
        to: Option<Form>,
    },
    /// Entanglement witnesses for a channel, or the dual bound for a program.
    Witness {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Orthogonal,
    Cone,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Cptp,
    Ebt,
    Ru,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Form {
    Kraus,
    Choi,
}

/// Every file the CLI writes is the library's document plus a version field.
#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    version: u32,
    #[serde(flatten)]
    body: T,
}

struct Outcome {
    verdict: String,
    delta: Option<f64>,
    code: u8,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses a JSON file, accepting an optional `"version": 1` envelope.
fn read_json(path: &Path) -> Result<Value, CliError> {
    let mut v: Value = serde_json::from_str(&read_text(path)?).map_err(CliError::json)?;
    if let Some(obj) = v.as_object_mut() {
        if let Some(ver) = obj.remove("version") {
            if ver != 1 {
                return Err(CliError::Json(format!("unsupported version {ver}")));
            }
        }
    }
    Ok(v)
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_value(read_json(path)?).map_err(CliError::json)
}

fn write_doc<T: Serialize>(path: Option<&Path>, body: T) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let mut text = serde_json::to_string_pretty(&Envelope { version: 1, body }).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn effective_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    match std::env::var("QCI_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("QCI_SEED must be an unsigned integer, got '{s}'"))),
        Err(_) => Ok(flag),
    }
}

fn trace_norm(m: &Matrix) -> Result<f64, CliError> {
    Ok(norms(m).map_err(CliError::from_core)?.trace_norm)
}

#[derive(Serialize)]
struct OrthogonalOutput {
    #[serde(flatten)]
    channel: ChannelDoc,
    certificate: qci_core::orthogonal::SpanCertificate,
    delta: f64,
}

fn interpolate_orthogonal(input: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let doc: OrthogonalProblemDoc = read_doc(input)?;
    let family = validate_family(&doc.a).map_err(CliError::from_core)?;
    let interp = build_interpolator(&family, &doc.b).map_err(CliError::from_core)?;
    let mut delta = 0.0;
    for (a, b) in doc.a.iter().zip(&doc.b) {
        let image = interp.channel.apply(a).map_err(CliError::from_core)?;
        delta += trace_norm(&(&image - b))?;
    }
    let cert = interp.certificate.clone();
    let verdict = if cert.ebt {
        "EBT"
    } else if cert.tp_defect <= qci_core::Tolerances::default().tp {
        "CPTP"
    } else {
        "CP, trace preserving on the span only"
    };
    write_doc(
        out,
        OrthogonalOutput {
            channel: ChannelDoc::from_kraus(&interp.channel),
            certificate: cert,
            delta,
        },
    )?;
    Ok(Outcome {
        verdict: verdict.into(),
        delta: Some(delta),
        code: 0,
    })
}

fn interpolate_cone(input: &Path, out: Option<&Path>, seed: Option<u64>, flags: &SolveFlags) -> Result<Outcome, CliError> {
    let doc = read_json(input)?;
    let generators = match &flags.generators {
        Some(p) => Some(parse_generators(&read_text(p)?)?),
        None => None,
    };
    let (spec, params) = validate_config(flags, doc, generators, seed)?;
    let report = solve(&spec, &params).map_err(CliError::from_core)?;
    write_doc(out, ReportDoc::from(&report))?;
    let code = match report.verdict {
        Verdict::Yes => 0,
        Verdict::No => 2,
        Verdict::Unknown => 3,
    };
    let verdict = match report.verdict {
        Verdict::Yes => format!("{} interpolant found", spec.cone.kind.name()),
        Verdict::No => format!("no {} interpolant (lower bound {:.8e})", spec.cone.kind.name(), report.lower_bound),
        Verdict::Unknown => format!("{} interpolant unknown", spec.cone.kind.name()),
    };
    Ok(Outcome {
        verdict,
        delta: Some(report.delta),
        code,
    })
}

#[derive(Serialize)]
struct CheckOutput {
    check: &'static str,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tp_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<qci_core::cone::Atom>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Matrix>,
}

impl CheckOutput {
    fn new(check: &'static str, verdict: &str) -> Self {
        CheckOutput {
            check,
            verdict: verdict.into(),
            min_eigenvalue: None,
            tp_defect: None,
            residual: None,
            atoms: vec![],
            witness: None,
        }
    }
}

fn check(what: What, input: &Path, out: Option<&Path>, seed: u64, budget: usize) -> Result<Outcome, CliError> {
    let doc: ChannelDoc = read_doc(input)?;
    let choi: ChoiMatrix = doc.to_choi().map_err(CliError::from_core)?;
    let tol = qci_core::Tolerances::default();
    let (report, code) = match what {
        What::Cptp => {
            let e = qci_core::matrix::eigh(choi.matrix()).map_err(CliError::from_core)?;
            let scale = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let lo = e.min_value();
            let tp = choi.tp_defect();
            let ok = lo >= -tol.psd * scale && tp <= tol.tp;
            let mut r = CheckOutput::new("cptp", if ok { "CPTP" } else { "not CPTP" });
            r.min_eigenvalue = Some(lo);
            r.tp_defect = Some(tp);
            (r, if ok { 0 } else { 2 })
        }
        What::Ebt => {
            let class = classify_ebt(&choi, budget, seed).map_err(CliError::from_core)?;
            let mut r = CheckOutput::new("ebt", class.label());
            let code = match class {
                EbtClass::Certified { decomposition, .. } => {
                    if let Some(d) = decomposition {
                        r.residual = Some(d.residual);
                        r.atoms = d.atoms;
                    }
                    0
                }
                EbtClass::NotEbt { min_pt_eigenvalue, witness } => {
                    r.min_eigenvalue = Some(min_pt_eigenvalue);
                    r.witness = Some(witness.matrix);
                    2
                }
                EbtClass::Inconclusive { residual } => {
                    r.residual = Some(residual);
                    3
                }
            };
            (r, code)
        }
        What::Ru => {
            let dims = choi.dims();
            if dims.d1 != dims.d2 {
                return Err(CliError::Data(format!(
                    "random-unitary check needs a square channel, got {}⊗{}",
                    dims.d1, dims.d2
                )));
            }
            let tp = choi.tp_defect();
            let cone = ConeSpec::new(ConeKind::Ru, dims, vec![])
                .map_err(CliError::from_core)?
                .with_seed(seed);
            let (r, code) = if tp > tol.tp {
                let mut r = CheckOutput::new("ru", "not random-unitary");
                r.tp_defect = Some(tp);
                (r, 2)
            } else {
                match membership_decompose(choi.matrix(), &cone, budget) {
                    Ok(d) => {
                        let mut r = CheckOutput::new("ru", "random-unitary");
                        r.residual = Some(d.residual);
                        r.atoms = d.atoms;
                        (r, 0)
                    }
                    Err(f) if f.excluded => (CheckOutput::new("ru", "not random-unitary"), 2),
                    Err(f) => {
                        let mut r = CheckOutput::new("ru", "inconclusive");
                        r.residual = Some(f.residual);
                        (r, 3)
                    }
                }
            };
            (r, code)
        }
    };
    let verdict = report.verdict.clone();
    let delta = report.residual;
    write_doc(out, report)?;
    Ok(Outcome { verdict, delta, code })
}

fn convert(input: &Path, out: &Path, to: Option<Form>) -> Result<Outcome, CliError> {
    let doc: ChannelDoc = read_doc(input)?;
    let from = match doc {
        ChannelDoc::Kraus { .. } => Form::Kraus,
        ChannelDoc::Choi { .. } => Form::Choi,
    };
    let to = to.unwrap_or(if from == Form::Kraus { Form::Choi } else { Form::Kraus });
    let converted = match to {
        Form::Kraus => ChannelDoc::from_kraus(&doc.to_kraus().map_err(CliError::from_core)?),
        Form::Choi => ChannelDoc::from_choi(&doc.to_choi().map_err(CliError::from_core)?),
    };
    write_doc(Some(out), converted)?;
    Ok(Outcome {
        verdict: format!("converted {from:?} to {to:?}").to_lowercase(),
        delta: None,
        code: 0,
    })
}

#[derive(Serialize)]
struct ChannelWitness {
    pt_witness: Matrix,
    pt_value: f64,
    projection_pair: PairDoc,
}

#[derive(Serialize)]
struct PairDoc {
    r: Vec<qci_core::C64>,
    s: Vec<qci_core::C64>,
    value: f64,
    violated: bool,
}

#[derive(Serialize)]
struct DualWitness {
    gamma: f64,
    witnesses: Vec<Matrix>,
    violation: f64,
}

fn witness(input: &Path, out: Option<&Path>, seed: u64, restarts: usize) -> Result<Outcome, CliError> {
    let v = read_json(input)?;
    if v.get("X").is_some() {
        let x: Vec<Matrix> = serde_json::from_value(v["X"].clone()).map_err(CliError::json)?;
        let y: Vec<Matrix> = serde_json::from_value(v.get("Y").cloned().unwrap_or(Value::Null)).map_err(CliError::json)?;
        let problem = InterpolationProblem::new(x, y).map_err(CliError::from_core)?;
        let g = gamma_dual(&problem, &DualParams::default());
        let delta = -g.gamma;
        write_doc(
            out,
            DualWitness {
                gamma: g.gamma,
                witnesses: g.witnesses,
                violation: g.violation,
            },
        )?;
        return Ok(Outcome {
            verdict: format!("completely positive interpolation error at least {delta:.8e}"),
            delta: Some(delta),
            code: 0,
        });
    }
    let doc: ChannelDoc = serde_json::from_value(v).map_err(CliError::json)?;
    let choi = doc.to_choi().map_err(CliError::from_core)?;
    let w = pt_witness(choi.matrix(), choi.dims()).map_err(CliError::from_core)?;
    let pair = projection_pair_search(choi.matrix(), choi.dims(), restarts, seed, qci_core::Tolerances::default().psd)
        .map_err(CliError::from_core)?;
    let verdict = match (w.value < 0.0, pair.violated) {
        (_, true) => "map is not positive",
        (true, false) => "entangled Choi matrix, no positivity violation found",
        (false, false) => "no witness found",
    };
    let value = w.value;
    write_doc(
        out,
        ChannelWitness {
            pt_witness: w.matrix,
            pt_value: w.value,
            projection_pair: PairDoc {
                r: pair.r,
                s: pair.s,
                value: pair.value,
                violated: pair.violated,
            },
        },
    )?;
    Ok(Outcome {
        verdict: verdict.into(),
        delta: Some(value),
        code: 0,
    })
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Interpolate {
            method,
            input,
            out,
            seed,
            solve,
        } => {
            let seed = effective_seed(seed)?;
            match method {
                Method::Orthogonal => interpolate_orthogonal(&input, out.as_deref()),
                Method::Cone => interpolate_cone(&input, out.as_deref(), seed, &solve),
            }
        }
        Command::Check {
            what,
            input,
            out,
            seed,
            budget,
        } => {
            let seed = effective_seed(seed)?.unwrap_or(0);
            check(what, &input, out.as_deref(), seed, budget)
        }
        Command::Convert { input, out, to } => convert(&input, &out, to),
        Command::Witness {
            input,
            out,
            seed,
            restarts,
        } => {
            let seed = effective_seed(seed)?.unwrap_or(0);
            witness(&input, out.as_deref(), seed, restarts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => {
            match o.delta {
                Some(d) => println!("{} delta={d:.8e}", o.verdict),
                None => println!("{}", o.verdict),
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("qci: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
