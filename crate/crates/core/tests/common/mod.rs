//! Shared instance generators and independent oracles for integration tests.
#![allow(dead_code)]

use qci_core::cone::{Atom, AtomPayload};
use qci_core::matrix::{eigh, tensor_product, Matrix, C64};
use qci_core::random::{random_pure_state, random_state, random_unit_vector, SeededRng};
use rand::Rng;

/// `Σ_ij E_ij ⊗ E_ij`.
pub fn omega(d: usize) -> Matrix {
    let mut m = Matrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m += &tensor_product(&Matrix::unit(d, i, j), &Matrix::unit(d, i, j));
        }
    }
    m
}

/// `Σ V X V†` computed entry by entry.
pub fn conjugate_sum(ops: &[Matrix], x: &Matrix) -> Matrix {
    let m = ops[0].rows();
    let n = ops[0].cols();
    Matrix::from_fn(m, m, |a, b| {
        let mut s = C64::new(0.0, 0.0);
        for v in ops {
            for i in 0..n {
                for j in 0..n {
                    s += v[(a, i)] * x[(i, j)] * v[(b, j)].conj();
                }
            }
        }
        s
    })
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &Matrix) -> f64 {
    eigh(&m.hermitian_part()).unwrap().values.iter().map(|v| v.abs()).sum()
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    eigh(&m.hermitian_part()).unwrap().values[0]
}

/// Partial transpose on the second factor of a `d1 ⊗ d2` matrix, by indices.
pub fn pt_second(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    Matrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (i, p) = (r / d2, r % d2);
        let (j, q) = (c / d2, c % d2);
        m[(i * d2 + q, j * d2 + p)]
    })
}

/// `tr_1` of a `d1 ⊗ d2` matrix, by indices.
pub fn ptrace_first(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    Matrix::from_fn(d2, d2, |p, q| (0..d1).map(|i| m[(i * d2 + p, i * d2 + q)]).sum())
}

/// `tr_2` of a `d1 ⊗ d2` matrix, by indices.
pub fn ptrace_second(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    Matrix::from_fn(d1, d1, |i, j| (0..d2).map(|p| m[(i * d2 + p, j * d2 + p)]).sum())
}

/// A random measure-and-prepare channel on qubits: a random POVM of `k`
/// rank-one effects and random output states, as `(R_k, F_k)` pairs.
pub fn random_measure_prepare(rng: &mut SeededRng, d: usize, k: usize) -> Vec<(Matrix, Matrix)> {
    // F_k = S^{-1/2} g g† S^{-1/2} with S = Σ g g†
    let gs: Vec<Vec<C64>> = (0..k).map(|_| random_unit_vector(rng, d)).collect();
    let mut s = Matrix::zeros(d, d);
    for g in &gs {
        s += &Matrix::ket_bra(g);
    }
    let e = eigh(&s).unwrap();
    let inv_sqrt = e.map(|l| 1.0 / l.sqrt());
    gs.iter()
        .map(|g| {
            let f = &(&inv_sqrt * &Matrix::ket_bra(g)) * &inv_sqrt;
            let r = if rng.random::<bool>() {
                random_pure_state(rng, d)
            } else {
                random_state(rng, d)
            };
            (r, f)
        })
        .collect()
}

pub fn apply_holevo(pairs: &[(Matrix, Matrix)], x: &Matrix) -> Matrix {
    let d = pairs[0].0.rows();
    let mut out = Matrix::zeros(d, d);
    for (r, f) in pairs {
        out += &r.scale_c((f * x).trace());
    }
    out
}

/// Weighted atom matrix built by indices, without the library's tensor code.
pub fn realize_direct(a: &Atom, gens: &[Matrix]) -> Matrix {
    let m = match &a.payload {
        AtomPayload::Product { output, input } => {
            let (m, n) = (output.rows(), input.rows());
            Matrix::from_fn(m * n, m * n, |r, c| output[(r / n, c / n)] * input[(r % n, c % n)])
        }
        AtomPayload::Unitary { u } => {
            // vec of u† with row-major index (i, p) ↦ i·d + p
            let d = u.rows();
            let v: Vec<C64> = (0..d * d).map(|k| u[(k % d, k / d)].conj()).collect();
            Matrix::ket_bra(&v)
        }
        AtomPayload::Generator { index } => gens[*index].clone(),
        AtomPayload::Ray { v } => Matrix::ket_bra(v),
    };
    m.scale(a.weight)
}
