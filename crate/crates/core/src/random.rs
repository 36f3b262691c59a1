//! Seeded random matrices, states, unitaries and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::matrix::{normalize, vdot, Matrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian_c64(rng)).collect()
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// `(G + G†)/2` for a Ginibre matrix `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    ginibre(rng, n, n).hermitian_part()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let mut v = gaussian_vector(rng, n);
    normalize(&mut v);
    v
}

/// Pure state `|ψ⟩⟨ψ|` with Haar-random `ψ`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    Matrix::ket_bra(&random_unit_vector(rng, n))
}

/// Density matrix `GG†/tr(GG†)` (Hilbert–Schmidt measure for square `G`).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = ginibre(rng, n, n);
    let rho = &g * &g.adjoint();
    let t = rho.trace().re;
    rho.scale(1.0 / t).hermitian_part()
}

/// Random PSD matrix of the given rank.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Matrix {
    let g = ginibre(rng, n, rank);
    (&g * &g.adjoint()).hermitian_part()
}

/// Haar-random unitary by Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        for c in &cols {
            let p = vdot(c, &v);
            for (x, y) in v.iter_mut().zip(c) {
                *x -= p * y;
            }
        }
        if normalize(&mut v) > 1e-8 {
            cols.push(v);
        }
    }
    Matrix::from_columns(&cols)
}

/// Random CPTP map with `rank` Kraus operators, from a Haar-random isometry.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    in_dim: usize,
    out_dim: usize,
    rank: usize,
) -> KrausChannel {
    // stack rank*out_dim x in_dim isometry
    let big = rank * out_dim;
    assert!(big >= in_dim, "need rank*out_dim >= in_dim");
    let u = random_unitary(rng, big);
    let ops = (0..rank)
        .map(|k| Matrix::from_fn(out_dim, in_dim, |i, j| u[(k * out_dim + i, j)]))
        .collect();
    KrausChannel::new(in_dim, out_dim, ops).expect("isometry blocks form a channel")
}

/// Random row-stochastic `n x m` matrix.
pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let row: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect()
}
