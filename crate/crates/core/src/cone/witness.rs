//! Entanglement witnesses: partial-transpose witnesses for Choi matrices and a
//! search over pairs of rank-one projections for block positivity.

use crate::cone::lmo::min_product_vector;
use crate::error::{dim_err, Result};
use crate::matrix::{jacobi_eigh, partial_transpose, BipartiteDims, Factor, Matrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PtWitness {
    /// `W = PT(|w⟩⟨w|)`, nonnegative on every separable matrix.
    pub matrix: Matrix,
    /// `tr[W C]`; negative exactly when `C` has a negative partial transpose.
    pub value: f64,
}

/// Witness built from the lowest eigenvector of the partial transpose on the
/// second factor.
pub fn pt_witness(c: &Matrix, dims: BipartiteDims) -> Result<PtWitness> {
    let pt = partial_transpose(c, Factor::Second, dims)?;
    let e = jacobi_eigh(&pt);
    let w = e.vector(0);
    let matrix = partial_transpose(&Matrix::ket_bra(&w), Factor::Second, dims)?;
    Ok(PtWitness {
        value: crate::matrix::real_pairing(&matrix, c),
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    /// Unit vectors of the projections `R = rr†`, `S = ss†`.
    pub r: Vec<C64>,
    pub s: Vec<C64>,
    /// `tr[A (R⊗S)]`.
    pub value: f64,
    /// Whether `value` is negative beyond `tol·‖A‖`.
    pub violated: bool,
}

/// Searches rank-one projection pairs for `tr[A(R⊗S)] < 0`. A violated pair
/// shows `A` is not block positive; finding none is not a proof that it is.
pub fn projection_pair_search(
    a: &Matrix,
    dims: BipartiteDims,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<ProjectionPair> {
    dims.check(a)?;
    if restarts == 0 {
        return dim_err("at least one restart is required");
    }
    let p = min_product_vector(a, dims, restarts, seed);
    let scale = a.max_abs().max(1.0);
    Ok(ProjectionPair {
        violated: p.value < -tol * scale,
        r: p.r,
        s: p.s,
        value: p.value,
    })
}
