//! Kraus, Choi and Holevo (measure-and-prepare) representations of linear maps.
//!
//! Choi convention: `C = Σ_ij Φ(E_ij) ⊗ E_ij`, output factor first, input
//! factor second. With it `Φ(X) = tr_2[C (I ⊗ Xᵀ)]` and trace preservation
//! reads `tr_1[C] = I`. The block form `[[Φ(E_ij)]] = Σ E_ij ⊗ Φ(E_ij)` is the
//! factor-swapped matrix, see [`ChoiMatrix::block_form`].

use crate::error::{dim_err, Error, Result};
use crate::matrix::{
    eigh, jacobi_eigh, operator_norm, partial_trace, partial_transpose, singular_values,
    swap_factors, unitarity_defect, BipartiteDims, Factor, Matrix, C64,
};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    ops: Vec<Matrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, ops: Vec<Matrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidInput("Kraus list is empty".into()));
        }
        for (k, op) in ops.iter().enumerate() {
            if op.rows() != out_dim || op.cols() != in_dim {
                return dim_err(format!(
                    "Kraus operator {} is {}x{}, expected {}x{}",
                    k,
                    op.rows(),
                    op.cols(),
                    out_dim,
                    in_dim
                ));
            }
        }
        Ok(KrausChannel {
            in_dim,
            out_dim,
            ops,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    /// `Σ V†V`.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.in_dim, self.in_dim);
        for v in &self.ops {
            g += &(&v.adjoint() * v);
        }
        g
    }

    /// `‖Σ V†V − I‖_op`.
    pub fn tp_defect(&self) -> f64 {
        operator_norm(&(&self.gram() - &Matrix::identity(self.in_dim)))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_defect() <= tol
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        apply_kraus(self, x)
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi_from_kraus(self)
    }
}

/// `Φ(X) = Σ V X V†`.
pub fn apply_kraus(ch: &KrausChannel, x: &Matrix) -> Result<Matrix> {
    if x.rows() != ch.in_dim || x.cols() != ch.in_dim {
        return dim_err(format!(
            "input is {}x{}, channel expects {}x{}",
            x.rows(),
            x.cols(),
            ch.in_dim,
            ch.in_dim
        ));
    }
    let mut out = Matrix::zeros(ch.out_dim, ch.out_dim);
    for v in &ch.ops {
        out += &(&(v * x) * &v.adjoint());
    }
    Ok(out)
}

/// Choi matrix `Σ |vec V⟩⟨vec V|` with row-major `vec`, which equals
/// `Σ_ij Φ(E_ij) ⊗ E_ij`.
pub fn choi_from_kraus(ch: &KrausChannel) -> ChoiMatrix {
    let n = ch.in_dim * ch.out_dim;
    let mut c = Matrix::zeros(n, n);
    for v in &ch.ops {
        c += &Matrix::ket_bra(v.data());
    }
    ChoiMatrix {
        matrix: c,
        dims: BipartiteDims::new(ch.out_dim, ch.in_dim),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: Matrix,
    dims: BipartiteDims,
}

impl ChoiMatrix {
    /// Wraps a Hermitian matrix of side `out_dim * in_dim`.
    pub fn new(matrix: Matrix, out_dim: usize, in_dim: usize) -> Result<Self> {
        let dims = BipartiteDims::new(out_dim, in_dim);
        if !matrix.is_square() || matrix.rows() != dims.total() {
            return dim_err(format!(
                "Choi matrix is {}x{}, expected side {}",
                matrix.rows(),
                matrix.cols(),
                dims.total()
            ));
        }
        matrix.check_hermitian(Tolerances::default().herm)?;
        Ok(ChoiMatrix { matrix, dims })
    }

    /// From the block form `[[Φ(E_ij)]]_ij = Σ E_ij ⊗ Φ(E_ij)`.
    pub fn from_block_form(block: &Matrix, out_dim: usize, in_dim: usize) -> Result<Self> {
        let m = swap_factors(block, BipartiteDims::new(in_dim, out_dim))?;
        ChoiMatrix::new(m, out_dim, in_dim)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn out_dim(&self) -> usize {
        self.dims.d1
    }

    pub fn in_dim(&self) -> usize {
        self.dims.d2
    }

    pub fn block_form(&self) -> Matrix {
        swap_factors(&self.matrix, self.dims).expect("dims checked at construction")
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        apply_choi(self, x)
    }

    /// `‖tr_1[C] − I‖_op`.
    pub fn tp_defect(&self) -> f64 {
        let t = partial_trace(&self.matrix, Factor::First, self.dims).expect("dims checked");
        operator_norm(&(&t - &Matrix::identity(self.in_dim())))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_defect() <= tol
    }

    /// `‖tr_2[C] − I‖_op`, zero exactly for unital maps with `d = d'`.
    pub fn unitality_defect(&self) -> f64 {
        let t = partial_trace(&self.matrix, Factor::Second, self.dims).expect("dims checked");
        if t.rows() != self.in_dim() {
            return f64::INFINITY;
        }
        operator_norm(&(&t - &Matrix::identity(t.rows())))
    }

    pub fn kraus(&self) -> Result<KrausChannel> {
        kraus_from_choi(self)
    }
}

/// `Φ(X) = tr_2[C (I ⊗ Xᵀ)]`, evaluated entrywise as
/// `Φ(X)_ab = Σ_jl C[(a,j),(b,l)] X_jl`.
pub fn apply_choi(c: &ChoiMatrix, x: &Matrix) -> Result<Matrix> {
    let (dout, din) = (c.out_dim(), c.in_dim());
    if x.rows() != din || x.cols() != din {
        return dim_err(format!(
            "input is {}x{}, Choi matrix expects {}x{}",
            x.rows(),
            x.cols(),
            din,
            din
        ));
    }
    Ok(apply_choi_raw(&c.matrix, dout, din, x))
}

pub(crate) fn apply_choi_raw(c: &Matrix, dout: usize, din: usize, x: &Matrix) -> Matrix {
    let n = dout * din;
    let data = c.data();
    let xd = x.data();
    Matrix::from_fn(dout, dout, |a, b| {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..din {
            let row = &data[(a * din + j) * n + b * din..(a * din + j) * n + b * din + din];
            let xr = &xd[j * din..(j + 1) * din];
            for (cv, xv) in row.iter().zip(xr) {
                s += cv * xv;
            }
        }
        s
    })
}

/// Minimal Kraus form from the eigenpairs of `C` above the relative rank cut.
pub fn kraus_from_choi(c: &ChoiMatrix) -> Result<KrausChannel> {
    kraus_from_choi_with(c, &Tolerances::default())
}

pub fn kraus_from_choi_with(c: &ChoiMatrix, tol: &Tolerances) -> Result<KrausChannel> {
    let e = eigh(&c.matrix)?;
    let top = e.max_value().max(0.0);
    let scale = top.max(1.0);
    if e.min_value() < -tol.psd * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min_value(),
        });
    }
    let (dout, din) = (c.out_dim(), c.in_dim());
    let cut = tol.rank * top;
    let mut ops = Vec::new();
    for (k, &lam) in e.values.iter().enumerate().rev() {
        if lam <= cut || lam <= 0.0 {
            continue;
        }
        let v: Vec<C64> = e.vector(k).iter().map(|z| z * lam.sqrt()).collect();
        ops.push(Matrix::reshape_vec(&v, dout, din)?);
    }
    if ops.is_empty() {
        ops.push(Matrix::zeros(dout, din));
    }
    KrausChannel::new(din, dout, ops)
}

/// Outcome of the PPT test on a two-qubit Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum EbtDecision {
    /// Partial transpose is PSD; exact separability at 2⊗2.
    Accept { min_eigenvalue: f64 },
    /// Partial transpose has a negative eigenvalue; `witness` is its eigenvector.
    Reject {
        min_eigenvalue: f64,
        witness: Vec<C64>,
    },
}

impl EbtDecision {
    pub fn accepted(&self) -> bool {
        matches!(self, EbtDecision::Accept { .. })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            EbtDecision::Accept { min_eigenvalue } | EbtDecision::Reject { min_eigenvalue, .. } => {
                *min_eigenvalue
            }
        }
    }
}

pub fn is_ebt_qubit(c: &ChoiMatrix) -> Result<EbtDecision> {
    is_ebt_qubit_with(c, Tolerances::default().psd)
}

pub fn is_ebt_qubit_with(c: &ChoiMatrix, psd_tol: f64) -> Result<EbtDecision> {
    if c.dims != BipartiteDims::new(2, 2) {
        return dim_err(format!(
            "PPT decision needs 2⊗2, got {}⊗{}",
            c.dims.d1, c.dims.d2
        ));
    }
    let pt = partial_transpose(&c.matrix, Factor::Second, c.dims)?;
    let e = jacobi_eigh(&pt);
    let scale = e.values.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let lo = e.min_value();
    if lo >= -psd_tol * scale {
        Ok(EbtDecision::Accept { min_eigenvalue: lo })
    } else {
        Ok(EbtDecision::Reject {
            min_eigenvalue: lo,
            witness: e.vector(0),
        })
    }
}

/// Choi matrix of `X ↦ Σ p_k U_k† X U_k`.
pub fn random_unitary_choi(weights: &[f64], unitaries: &[Matrix]) -> Result<ChoiMatrix> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} unitaries",
            weights.len(),
            unitaries.len()
        )));
    }
    let d = unitaries[0].rows();
    let tol = Tolerances::default().tp;
    let mut c = Matrix::zeros(d * d, d * d);
    for (&p, u) in weights.iter().zip(unitaries) {
        if !(p > 0.0) {
            return Err(Error::InvalidInput(format!("weight {p} is not positive")));
        }
        if u.rows() != d || !u.is_square() {
            return dim_err("unitaries of different sizes");
        }
        let defect = unitarity_defect(u);
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        c.axpy(p, &Matrix::ket_bra(u.adjoint().data()));
    }
    ChoiMatrix::new(c, d, d)
}

/// Measure-and-prepare form `Φ(ρ) = Σ R_k tr[F_k ρ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoEnsemble {
    pairs: Vec<(Matrix, Matrix)>,
}

impl HolevoEnsemble {
    /// Pairs `(R_k, F_k)`; each `F_k` must be PSD.
    pub fn new(pairs: Vec<(Matrix, Matrix)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("empty ensemble".into()));
        }
        let (ro, fi) = (pairs[0].0.rows(), pairs[0].1.rows());
        for (r, f) in &pairs {
            if r.rows() != ro || f.rows() != fi || !r.is_square() || !f.is_square() {
                return dim_err("ensemble members of inconsistent sizes");
            }
            crate::matrix::check_psd(f, Tolerances::default().psd)?;
        }
        Ok(HolevoEnsemble { pairs })
    }

    pub fn pairs(&self) -> &[(Matrix, Matrix)] {
        &self.pairs
    }

    pub fn in_dim(&self) -> usize {
        self.pairs[0].1.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.pairs[0].0.rows()
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.in_dim() || !x.is_square() {
            return dim_err("ensemble input size");
        }
        let mut out = Matrix::zeros(self.out_dim(), self.out_dim());
        for (r, f) in &self.pairs {
            let w = (f * x).trace();
            out += &r.scale_c(w);
        }
        Ok(out)
    }

    /// `‖Σ F_k − I‖_op`.
    pub fn measurement_defect(&self) -> f64 {
        let mut s = Matrix::zeros(self.in_dim(), self.in_dim());
        for (_, f) in &self.pairs {
            s += f;
        }
        operator_norm(&(&s - &Matrix::identity(self.in_dim())))
    }

    /// Trace-preserving (entanglement-breaking channel) within `tol`.
    pub fn is_ebt(&self, tol: f64) -> bool {
        self.measurement_defect() <= tol
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.in_dim() * self.out_dim();
        let mut c = Matrix::zeros(n, n);
        for (r, f) in &self.pairs {
            c += &crate::matrix::tensor_product(r, &f.transpose());
        }
        ChoiMatrix {
            matrix: c,
            dims: BipartiteDims::new(self.out_dim(), self.in_dim()),
        }
    }
}

/// Holevo form of a map whose Kraus operators all have rank one:
/// `A = x y†` gives `R = x x†/‖x‖²`, `F = ‖x‖² y y†`.
pub fn holevo_from_rank1(ch: &KrausChannel) -> Result<HolevoEnsemble> {
    let rank_tol = Tolerances::default().rank;
    let mut pairs = Vec::new();
    for (index, a) in ch.ops.iter().enumerate() {
        let s = singular_values(a);
        let top = s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            continue;
        }
        let rank = s.iter().filter(|&&x| x > rank_tol * top).count();
        if rank > 1 {
            return Err(Error::NotRankOne { index, rank });
        }
        // any nonzero column spans the range; take the largest
        let j = (0..a.cols())
            .max_by(|&p, &q| {
                let np: f64 = a.column(p).iter().map(|z| z.norm_sqr()).sum();
                let nq: f64 = a.column(q).iter().map(|z| z.norm_sqr()).sum();
                np.total_cmp(&nq)
            })
            .unwrap_or(0);
        let mut x = a.column(j);
        crate::matrix::normalize(&mut x);
        let y = a.adjoint().mul_vec(&x);
        pairs.push((Matrix::ket_bra(&x), Matrix::ket_bra(&y)));
    }
    if pairs.is_empty() {
        pairs.push((
            Matrix::zeros(ch.out_dim, ch.out_dim),
            Matrix::zeros(ch.in_dim, ch.in_dim),
        ));
    }
    HolevoEnsemble::new(pairs)
}
