//! Dense complex matrices with bipartite tensor structure.
//!
//! Tensor index convention: the pair `(i, p)` of a `d1 ⊗ d2` space maps to the
//! flat index `i * d2 + p`, so `A ⊗ B` is the row-major block matrix `[[A_ij B]]`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dim_err, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Dimensions of the two tensor factors labelling a square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDims {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteDims {
    pub fn new(d1: usize, d2: usize) -> Self {
        BipartiteDims { d1, d2 }
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn check(&self, m: &Matrix) -> Result<()> {
        if !m.is_square() || m.rows != self.total() {
            return dim_err(format!(
                "{}x{} matrix does not match {}⊗{} factors",
                m.rows, m.cols, self.d1, self.d2
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return dim_err(format!(
                "{} entries given for a {}x{} matrix",
                data.len(),
                rows,
                cols
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Matrix::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(x, 0.0);
        }
        m
    }

    /// Matrix unit `E_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.data[i * n + j] = ONE;
        m
    }

    /// `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Matrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Projector-like `v v†`.
    pub fn ket_bra(v: &[C64]) -> Self {
        Matrix::outer(v, v)
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M_ij − conj(M_ji)|`; infinite for non-square input.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return dim_err(format!("{}x{} matrix is not square", self.rows, self.cols));
        }
        let asym = self.asymmetry();
        let bound = tol * self.max_abs();
        if asym > bound {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                tolerance: bound,
            });
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.check_hermitian(tol).is_ok()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        Matrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Hermitian matrix with the same eigenvectors and eigenvalues mapped by `f`.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let e = jacobi_eigh(&self.hermitian_part());
        e.map(f)
    }

    /// Real vector encoding of a Hermitian matrix preserving the Frobenius
    /// inner product: diagonal entries, then `√2·Re` and `√2·Im` of the strict
    /// upper triangle.
    pub fn hermitian_coords(&self) -> Vec<f64> {
        let n = self.rows;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            out.push(self[(i, i)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in i + 1..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out.push(r2 * z.re);
                out.push(r2 * z.im);
            }
        }
        out
    }

    pub fn from_hermitian_coords(n: usize, coords: &[f64]) -> Matrix {
        assert_eq!(coords.len(), n * n);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(coords[i], 0.0);
        }
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                let z = C64::new(coords[k] * r2, coords[k + 1] * r2);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        m
    }

    /// Row-major reshape of a vector into a `rows x cols` matrix.
    pub fn reshape_vec(v: &[C64], rows: usize, cols: usize) -> Result<Matrix> {
        Matrix::from_vec(rows, cols, v.to_vec())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product dimensions")
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: f64) -> Matrix {
        self.scale(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let data = repr.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Matrix::from_vec(repr.rows, repr.cols, data).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// vectors

pub fn vdot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [C64]) -> f64 {
    let n = vnorm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// tensor operations

/// Kronecker product `A ⊗ B`.
pub fn tensor_product(a: &Matrix, b: &Matrix) -> Matrix {
    let (br, bc) = (b.rows, b.cols);
    Matrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Trace out one factor of a `d1 ⊗ d2` square matrix.
pub fn partial_trace(m: &Matrix, which: Factor, dims: BipartiteDims) -> Result<Matrix> {
    dims.check(m)?;
    let (d1, d2) = (dims.d1, dims.d2);
    Ok(match which {
        Factor::First => Matrix::from_fn(d2, d2, |p, q| {
            (0..d1).map(|i| m[(i * d2 + p, i * d2 + q)]).sum()
        }),
        Factor::Second => Matrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|p| m[(i * d2 + p, j * d2 + p)]).sum()
        }),
    })
}

/// Transpose one tensor factor of a `d1 ⊗ d2` square matrix.
pub fn partial_transpose(m: &Matrix, which: Factor, dims: BipartiteDims) -> Result<Matrix> {
    dims.check(m)?;
    let d2 = dims.d2;
    let n = dims.total();
    Ok(Matrix::from_fn(n, n, |r, c| {
        let (i, p) = (r / d2, r % d2);
        let (j, q) = (c / d2, c % d2);
        match which {
            Factor::First => m[(j * d2 + p, i * d2 + q)],
            Factor::Second => m[(i * d2 + q, j * d2 + p)],
        }
    }))
}

/// Exchange the two tensor factors: `A ⊗ B ↦ B ⊗ A`.
pub fn swap_factors(m: &Matrix, dims: BipartiteDims) -> Result<Matrix> {
    dims.check(m)?;
    let (d1, d2) = (dims.d1, dims.d2);
    let n = dims.total();
    Ok(Matrix::from_fn(n, n, |r, c| {
        let (p, i) = (r / d1, r % d1);
        let (q, j) = (c / d1, c % d1);
        m[(i * d2 + p, j * d2 + q)]
    }))
}

/// Hilbert–Schmidt inner product `tr[A† B]`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> Result<C64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return dim_err(format!(
            "inner product of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        ));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `Re tr[A B]` for Hermitian `A`, `B` (the real pairing used by gradients).
pub(crate) fn real_pairing(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

// ---------------------------------------------------------------------------
// spectral

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fv[k];
                for j in 0..n {
                    out.data[i * n + j] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(m: &Matrix) -> Result<Eigh> {
    m.check_hermitian(crate::tol::Tolerances::default().herm)?;
    Ok(jacobi_eigh(m))
}

/// Jacobi sweeps on a matrix already known to be Hermitian; only the
/// Hermitian part of the input is used.
pub(crate) fn jacobi_eigh(m: &Matrix) -> Eigh {
    let n = m.rows;
    let mut a = m.hermitian_part().data;
    let mut v = Matrix::identity(n).data;
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        let skip = 1e-18 * scale;
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        off += a[p * n + q].norm_sqr();
                    }
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let g = a[p * n + q];
                    let ag = g.norm();
                    if ag <= skip {
                        continue;
                    }
                    let alpha = a[p * n + p].re;
                    let beta = a[q * n + q].re;
                    let e_bar = (g / ag).conj();
                    let tau = (beta - alpha) / (2.0 * ag);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G = diag(1, ē) · [[c, s], [−s, c]]
                    let gpp = C64::new(c, 0.0);
                    let gpq = C64::new(s, 0.0);
                    let gqp = e_bar * (-s);
                    let gqq = e_bar * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = akp * gpp + akq * gqp;
                        a[k * n + q] = akp * gpq + akq * gqq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
                        a[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
                    }
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * gpp + vkq * gqp;
                        v[k * n + q] = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].re.total_cmp(&a[y * n + y].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Eigh { values, vectors }
}

/// Singular values in descending order, via the Hermitian dilation
/// `[[0, A], [A†, 0]]` (absolute accuracy ~ ε‖A‖ for small singular values).
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let (r, c) = (m.rows, m.cols);
    let n = r + c;
    let mut dil = Matrix::zeros(n, n);
    for i in 0..r {
        for j in 0..c {
            dil[(i, r + j)] = m[(i, j)];
            dil[(r + j, i)] = m[(i, j)].conj();
        }
    }
    let e = jacobi_eigh(&dil);
    let k = r.min(c);
    e.values.iter().rev().take(k).map(|&x| x.max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub trace_norm: f64,
    pub operator_norm: f64,
    pub frobenius: f64,
}

/// Trace, operator and Frobenius norms of a Hermitian matrix.
pub fn norms(m: &Matrix) -> Result<Norms> {
    let e = eigh(m)?;
    Ok(spectral_norms(&e, m.frobenius()))
}

fn spectral_norms(e: &Eigh, frobenius: f64) -> Norms {
    Norms {
        trace_norm: e.values.iter().map(|x| x.abs()).sum(),
        operator_norm: e.values.iter().map(|x| x.abs()).fold(0.0, f64::max),
        frobenius,
    }
}

/// Norms of a matrix produced internally and Hermitian up to rounding.
pub(crate) fn norms_of_computed(m: &Matrix) -> Norms {
    spectral_norms(&jacobi_eigh(m), m.frobenius())
}

pub(crate) fn trace_norm(m: &Matrix) -> f64 {
    jacobi_eigh(m).values.iter().map(|x| x.abs()).sum()
}

pub(crate) fn operator_norm(m: &Matrix) -> f64 {
    jacobi_eigh(m)
        .values
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

/// Returns the smallest eigenvalue if it is at least `-tol * max(1, ‖M‖_op)`.
pub fn check_psd(m: &Matrix, tol: f64) -> Result<f64> {
    let e = eigh(m)?;
    let scale = e.values.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let lo = e.min_value();
    if lo < -tol * scale {
        return Err(Error::NotPsd { min_eigenvalue: lo });
    }
    Ok(lo)
}

pub fn is_psd(m: &Matrix, tol: f64) -> bool {
    check_psd(m, tol).is_ok()
}

/// `‖U†U − I‖_op`, infinite for non-square input.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = &(&u.adjoint() * u) - &Matrix::identity(u.rows);
    operator_norm(&g)
}

/// Unitary factor of the polar decomposition `M = U P`, computed from the
/// eigendecomposition of `M†M`. Returns `None` when `M` is numerically singular.
pub fn polar_unitary(m: &Matrix) -> Option<Matrix> {
    let e = jacobi_eigh(&(&m.adjoint() * m));
    let top = e.max_value();
    if top <= 0.0 || e.min_value() <= 1e-24 * top {
        return None;
    }
    let inv_sqrt = e.map(|x| 1.0 / x.sqrt());
    Some(m * &inv_sqrt)
}

/// `exp(iH)` for Hermitian `H`.
pub fn expi_hermitian(h: &Matrix) -> Matrix {
    let e = jacobi_eigh(h);
    let n = e.values.len();
    let v = &e.vectors;
    let phases: Vec<C64> = e.values.iter().map(|&x| C64::new(0.0, x).exp()).collect();
    Matrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    })
}

pub fn pauli_x() -> Matrix {
    Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> Matrix {
    Matrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> Matrix {
    Matrix::from_diag(&[1.0, -1.0])
}
