//! Extreme rays of the supported cones.

use serde::{Deserialize, Serialize};

use crate::cone::program::{ConeKind, ConeSpec};
use crate::error::{Error, Result};
use crate::matrix::{check_psd, tensor_product, unitarity_defect, Matrix, C64};

/// Payloads realize PSD matrices: a product `output ⊗ input` of states, the
/// Choi matrix of `X ↦ U†XU`, a hull generator, or a ray `vv†` with `‖v‖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum AtomPayload {
    Product { output: Matrix, input: Matrix },
    Unitary { u: Matrix },
    Generator { index: usize },
    Ray { v: Vec<C64> },
}

impl AtomPayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AtomPayload::Product { .. } => "product",
            AtomPayload::Unitary { .. } => "unitary",
            AtomPayload::Generator { .. } => "generator",
            AtomPayload::Ray { .. } => "ray",
        }
    }

    pub fn realize(&self, cone: &ConeSpec) -> Matrix {
        match self {
            AtomPayload::Product { output, input } => tensor_product(output, input),
            AtomPayload::Unitary { u } => Matrix::ket_bra(u.adjoint().data()),
            AtomPayload::Generator { index } => cone.generators()[*index].clone(),
            AtomPayload::Ray { v } => Matrix::ket_bra(v),
        }
    }

    /// Trace of the realized matrix.
    pub fn trace(&self, cone: &ConeSpec) -> f64 {
        match self {
            AtomPayload::Product { .. } | AtomPayload::Ray { .. } => 1.0,
            AtomPayload::Unitary { u } => u.rows() as f64,
            AtomPayload::Generator { index } => cone.generators()[*index].trace().re,
        }
    }

    /// Checks the payload's structure and that it belongs to `cone`.
    pub fn validate(&self, cone: &ConeSpec, tol: f64) -> Result<()> {
        let expected = match self {
            AtomPayload::Product { .. } => ConeKind::Sep,
            AtomPayload::Unitary { .. } => ConeKind::Ru,
            AtomPayload::Generator { .. } => ConeKind::Hull,
            AtomPayload::Ray { .. } => ConeKind::Psd,
        };
        // every atom is PSD, so any atom lies in the PSD cone
        if cone.kind != expected && cone.kind != ConeKind::Psd {
            return Err(Error::InvalidInput(format!(
                "{} atom in a {} cone",
                self.kind_name(),
                cone.kind.name()
            )));
        }
        match self {
            AtomPayload::Product { output, input } => {
                for (s, d) in [(output, cone.dims.d1), (input, cone.dims.d2)] {
                    if s.rows() != d || !s.is_square() {
                        return Err(Error::DimensionMismatch("product factor size".into()));
                    }
                    check_psd(s, tol)?;
                    let t = s.trace().re;
                    if (t - 1.0).abs() > tol {
                        return Err(Error::TraceMismatch { left: t, right: 1.0 });
                    }
                }
            }
            AtomPayload::Unitary { u } => {
                if u.rows() != cone.dims.d1 {
                    return Err(Error::DimensionMismatch("unitary size".into()));
                }
                let defect = unitarity_defect(u);
                if defect > tol {
                    return Err(Error::NotUnitary { defect });
                }
            }
            AtomPayload::Generator { index } => {
                if *index >= cone.generators().len() {
                    return Err(Error::InvalidInput(format!("no generator {index}")));
                }
            }
            AtomPayload::Ray { v } => {
                if v.len() != cone.dims.total() {
                    return Err(Error::DimensionMismatch("ray length".into()));
                }
                let n = crate::matrix::vnorm(v);
                if (n - 1.0).abs() > tol {
                    return Err(Error::InvalidInput(format!("ray has norm {n}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    #[serde(flatten)]
    pub payload: AtomPayload,
}

impl Atom {
    pub fn new(weight: f64, payload: AtomPayload) -> Self {
        Atom { weight, payload }
    }

    /// `weight · realize(payload)`.
    pub fn matrix(&self, cone: &ConeSpec) -> Matrix {
        self.payload.realize(cone).scale(self.weight)
    }
}

/// `Σ weightᵢ · realize(payloadᵢ)`, zero for an empty list.
pub fn realize_sum(atoms: &[Atom], cone: &ConeSpec) -> Matrix {
    let n = cone.dims.total();
    let mut c = Matrix::zeros(n, n);
    for a in atoms {
        c.axpy(a.weight, &a.payload.realize(cone));
    }
    c
}
