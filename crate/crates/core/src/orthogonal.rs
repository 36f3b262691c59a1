//! Explicit entanglement-breaking interpolation for orthogonal positive inputs.
//!
//! For each pair `Aᵢ = W diag(a) W†`, `Bᵢ = Q diag(b) Q†` a rank-one transport
//! plan `D` moves the spectrum `a` onto `b`, giving rank-one Kraus operators that
//! map `Aᵢ` to `Bᵢ`. Composing with the projection
//! `P_{Aᵢ}(X) = ⟨Aᵢ, X⟩/⟨Aᵢ, Aᵢ⟩ · Aᵢ` and summing over `i` yields a map with
//! Choi matrix `Σ Bᵢ ⊗ Aᵢᵀ / ⟨Aᵢ, Aᵢ⟩`.

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{dim_err, Error, Result};
use crate::matrix::{
    check_psd, eigh, hs_inner, normalize, singular_values, unitarity_defect, Matrix, C64,
};
use crate::tol::Tolerances;

/// Pairwise Hilbert–Schmidt orthogonal, nonzero PSD matrices of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalFamily {
    members: Vec<Matrix>,
}

impl OrthogonalFamily {
    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].rows()
    }
}

pub fn validate_family(a: &[Matrix]) -> Result<OrthogonalFamily> {
    validate_family_with(a, &Tolerances::default())
}

/// Orthogonality is tested relative to `‖Aᵢ‖_F ‖Aⱼ‖_F`.
pub fn validate_family_with(a: &[Matrix], tol: &Tolerances) -> Result<OrthogonalFamily> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let d = a[0].rows();
    for (k, m) in a.iter().enumerate() {
        if !m.is_square() || m.rows() != d {
            return dim_err(format!("member {k} is {}x{}, expected {d}x{d}", m.rows(), m.cols()));
        }
        check_psd(m, tol.psd)?;
        if m.max_abs() == 0.0 {
            return Err(Error::InvalidInput(format!("member {k} is zero")));
        }
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let inner = hs_inner(&a[i], &a[j])?.norm();
            if inner > tol.orth * a[i].frobenius() * a[j].frobenius() {
                return Err(Error::NotOrthogonal {
                    first: i,
                    second: j,
                    inner,
                });
            }
        }
    }
    Ok(OrthogonalFamily { members: a.to_vec() })
}

/// Nonnegative `n x m` matrix `D` with `a·D = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub matrix: Vec<Vec<f64>>,
    pub row_stochastic: bool,
}

impl TransportPlan {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    /// Row vector times plan, `a·D`.
    pub fn push_forward(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (ap, row) in a.iter().zip(&self.matrix) {
            for (o, d) in out.iter_mut().zip(row) {
                *o += ap * d;
            }
        }
        out
    }
}

fn clip_spectrum(v: &[f64], tol: f64) -> Result<Vec<f64>> {
    let scale = v.iter().map(|x| x.abs()).fold(1.0, f64::max);
    v.iter()
        .map(|&x| {
            if x < -tol * scale {
                Err(Error::NotPsd { min_eigenvalue: x })
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

/// The rank-one plan `D_pq = b_q / Σa`.
pub fn transport_plan(a: &[f64], b: &[f64]) -> Result<TransportPlan> {
    let tol = Tolerances::default();
    let a = clip_spectrum(a, tol.psd)?;
    let b = clip_spectrum(b, tol.psd)?;
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if sa <= 0.0 || b.is_empty() {
        return Err(Error::InvalidInput("transport needs positive total mass".into()));
    }
    if (sa - sb).abs() > tol.trace * sa.max(1.0) {
        return Err(Error::TraceMismatch { left: sa, right: sb });
    }
    let row: Vec<f64> = b.iter().map(|q| q / sa).collect();
    let row_sum: f64 = row.iter().sum();
    Ok(TransportPlan {
        matrix: vec![row; a.len()],
        row_stochastic: (row_sum - 1.0).abs() <= 1e-12,
    })
}

/// Kraus operators `Kⱼ = V† eⱼ uⱼᵀ U†` with `uⱼ = (√d_1j, …, √d_nj)`; conjugation
/// by them sends `U diag(a) U†` to `V† diag(a·D) V`. Zero columns of `D` are skipped.
pub fn rank1_kraus(u: &Matrix, v: &Matrix, d: &TransportPlan) -> Result<Vec<Matrix>> {
    let tol = Tolerances::default().tp;
    for m in [u, v] {
        let defect = unitarity_defect(m);
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
    }
    let (n, m) = (d.rows(), d.cols());
    if u.rows() != n || v.rows() != m {
        return dim_err(format!(
            "plan is {n}x{m}, unitaries are {}x{} and {}x{}",
            u.rows(),
            u.rows(),
            v.rows(),
            v.rows()
        ));
    }
    let u_adj = u.adjoint();
    let mut ops = Vec::new();
    for j in 0..m {
        let col: Vec<f64> = d.matrix.iter().map(|row| row[j]).collect();
        if col.iter().all(|&x| x <= 0.0) {
            continue;
        }
        // uⱼᵀ U† as a row vector
        let row: Vec<C64> = (0..n)
            .map(|c| (0..n).map(|p| u_adj[(p, c)] * col[p].max(0.0).sqrt()).sum())
            .collect();
        let left: Vec<C64> = (0..m).map(|r| v[(j, r)].conj()).collect();
        ops.push(Matrix::from_fn(m, n, |r, c| left[r] * row[c]));
    }
    Ok(ops)
}

/// Whether the constructed map is entanglement breaking on the whole space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanCertificate {
    pub identity_in_span: bool,
    /// `‖I − Σ αᵢ Aᵢ‖_F / √d` for the least-squares `αᵢ`.
    pub span_residual: f64,
    pub coefficients: Vec<f64>,
    pub tp_defect: f64,
    pub rank_one: bool,
    /// Rank-one Kraus operators and trace preserving: an EBT certificate.
    pub ebt: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalInterpolant {
    pub channel: KrausChannel,
    pub certificate: SpanCertificate,
}

pub fn build_interpolator(a: &OrthogonalFamily, b: &[Matrix]) -> Result<OrthogonalInterpolant> {
    let tol = Tolerances::default();
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "{} inputs but {} outputs",
            a.len(),
            b.len()
        )));
    }
    let (d, m) = (a.dim(), b[0].rows());
    let mut ops = Vec::new();
    for (ai, bi) in a.members().iter().zip(b) {
        if !bi.is_square() || bi.rows() != m {
            return dim_err("outputs of different sizes");
        }
        check_psd(bi, tol.psd)?;
        let (ta, tb) = (ai.trace().re, bi.trace().re);
        if (ta - tb).abs() > tol.trace * ta.abs().max(1.0) {
            return Err(Error::TraceMismatch { left: ta, right: tb });
        }
        let ea = eigh(ai)?;
        let eb = eigh(bi)?;
        let plan = transport_plan(&ea.values, &eb.values)?;
        let kraus = rank1_kraus(&ea.vectors, &eb.vectors.adjoint(), &plan)?;

        // φᵢ ∘ P_{Aᵢ}: X ↦ ⟨Aᵢ,X⟩/c · Σⱼ Kⱼ Aᵢ Kⱼ†, with Kⱼ Aᵢ Kⱼ† = tⱼ ŷⱼŷⱼ†
        let c = hs_inner(ai, ai)?.re;
        for k in &kraus {
            let t = (&(k * ai) * &k.adjoint()).trace().re;
            if t <= 0.0 {
                continue;
            }
            let Some(mut y) = largest_column(k) else {
                continue;
            };
            normalize(&mut y);
            for (p, &ap) in ea.values.iter().enumerate() {
                if ap <= 0.0 {
                    continue;
                }
                let w = ea.vector(p);
                ops.push(Matrix::outer(&y, &w).scale((ap * t / c).sqrt()));
            }
        }
    }
    if ops.is_empty() {
        ops.push(Matrix::zeros(m, d));
    }
    let channel = KrausChannel::new(d, m, ops)?;
    let certificate = certify_ebt_on_span(a, &channel);
    Ok(OrthogonalInterpolant {
        channel,
        certificate,
    })
}

fn largest_column(k: &Matrix) -> Option<Vec<C64>> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for j in 0..k.cols() {
        let col = k.column(j);
        let n: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if n > 0.0 && best.as_ref().is_none_or(|(b, _)| n > *b) {
            best = Some((n, col));
        }
    }
    best.map(|(_, c)| c)
}

pub fn certify_ebt_on_span(a: &OrthogonalFamily, ch: &KrausChannel) -> SpanCertificate {
    let tol = Tolerances::default();
    let d = a.dim();
    // orthogonal family: least squares decouples into αᵢ = tr Aᵢ / ⟨Aᵢ, Aᵢ⟩
    let coefficients: Vec<f64> = a
        .members()
        .iter()
        .map(|m| m.trace().re / m.frobenius().powi(2))
        .collect();
    let mut r = Matrix::identity(d);
    for (alpha, m) in coefficients.iter().zip(a.members()) {
        r.axpy(-alpha, m);
    }
    let span_residual = r.frobenius() / (d as f64).sqrt();
    let identity_in_span = span_residual <= tol.span;
    let tp_defect = ch.tp_defect();
    let rank_one = ch.ops().iter().all(|k| {
        let s = singular_values(k);
        s.len() < 2 || s[1] <= tol.rank * s[0].max(1.0)
    });
    SpanCertificate {
        identity_in_span,
        span_residual,
        coefficients,
        tp_defect,
        rank_one,
        ebt: identity_in_span && rank_one && tp_defect <= tol.tp,
    }
}
