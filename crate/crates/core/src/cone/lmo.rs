//! Linear minimization oracles: for a Hermitian `G`, find a unit-trace
//! element of the cone minimizing `⟨G, ·⟩`.

use crate::cone::atom::{Atom, AtomPayload};
use crate::cone::program::{ConeKind, ConeSpec};
use crate::error::{dim_err, Result};
use crate::matrix::{
    jacobi_eigh, kron_vec, polar_unitary, real_pairing, vdot, BipartiteDims, Matrix, C64,
};
use crate::random::{random_unit_vector, random_unitary, seeded};

#[derive(Debug, Clone, PartialEq)]
pub struct LmoOutput {
    /// Weight chosen so the atom has unit trace.
    pub atom: Atom,
    /// `⟨G, atom⟩` per unit trace.
    pub value: f64,
}

pub fn lmo(cone: &ConeSpec, g: &Matrix) -> Result<LmoOutput> {
    let n = cone.dims.total();
    if !g.is_square() || g.rows() != n {
        return dim_err(format!("gradient is {}x{}, cone side is {n}", g.rows(), g.cols()));
    }
    g.check_hermitian(crate::tol::Tolerances::default().herm)?;
    Ok(lmo_seeded(cone, g, cone.seed))
}

/// Distinct restart seeds from one base seed.
pub(crate) fn restart_seed(base: u64, k: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(k.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        ^ 0x94D0_49BB_1331_11EB
}

pub(crate) fn lmo_seeded(cone: &ConeSpec, g: &Matrix, seed: u64) -> LmoOutput {
    match cone.kind {
        ConeKind::Psd => {
            let e = jacobi_eigh(g);
            LmoOutput {
                atom: Atom::new(1.0, AtomPayload::Ray { v: e.vector(0) }),
                value: e.min_value(),
            }
        }
        ConeKind::Sep => {
            let p = min_product_vector(g, cone.dims, cone.lmo_restarts, seed);
            LmoOutput {
                atom: Atom::new(
                    1.0,
                    AtomPayload::Product {
                        output: Matrix::ket_bra(&p.r),
                        input: Matrix::ket_bra(&p.s),
                    },
                ),
                value: p.value,
            }
        }
        ConeKind::Ru => {
            let d = cone.dims.d1;
            let (w, value) = min_unitary_vector(g, d, cone.lmo_restarts, seed);
            LmoOutput {
                atom: Atom::new(1.0 / d as f64, AtomPayload::Unitary { u: w.adjoint() }),
                value,
            }
        }
        ConeKind::Hull => {
            let mut best = (f64::INFINITY, 0);
            for (k, p) in cone.generators().iter().enumerate() {
                let v = real_pairing(g, p) / p.trace().re;
                if v < best.0 {
                    best = (v, k);
                }
            }
            let t = cone.generators()[best.1].trace().re;
            LmoOutput {
                atom: Atom::new(1.0 / t, AtomPayload::Generator { index: best.1 }),
                value: best.0,
            }
        }
    }
}

/// Unit vectors `r`, `s` approximately minimizing `⟨r⊗s|G|r⊗s⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSearch {
    pub r: Vec<C64>,
    pub s: Vec<C64>,
    pub value: f64,
}

fn quad(g: &Matrix, v: &[C64]) -> f64 {
    vdot(v, &g.mul_vec(v)).re
}

/// `(I ⊗ s)† G (I ⊗ s)`.
fn contract_second(g: &Matrix, dims: BipartiteDims, s: &[C64]) -> Matrix {
    let (d1, d2) = (dims.d1, dims.d2);
    Matrix::from_fn(d1, d1, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d2 {
            let sj = s[j].conj();
            for l in 0..d2 {
                acc += sj * g[(a * d2 + j, b * d2 + l)] * s[l];
            }
        }
        acc
    })
}

/// `(r ⊗ I)† G (r ⊗ I)`.
fn contract_first(g: &Matrix, dims: BipartiteDims, r: &[C64]) -> Matrix {
    let (d1, d2) = (dims.d1, dims.d2);
    Matrix::from_fn(d2, d2, |j, l| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d1 {
            let ra = r[a].conj();
            for b in 0..d1 {
                acc += ra * g[(a * d2 + j, b * d2 + l)] * r[b];
            }
        }
        acc
    })
}

fn alternate(g: &Matrix, dims: BipartiteDims, mut r: Vec<C64>) -> ProductSearch {
    let scale = g.max_abs().max(1e-300);
    let mut s = jacobi_eigh(&contract_first(g, dims, &r)).vector(0);
    let mut value = quad(g, &kron_vec(&r, &s));
    for _ in 0..500 {
        r = jacobi_eigh(&contract_second(g, dims, &s)).vector(0);
        s = jacobi_eigh(&contract_first(g, dims, &r)).vector(0);
        let v = quad(g, &kron_vec(&r, &s));
        let done = value - v <= 1e-15 * scale;
        value = v.min(value);
        if done {
            break;
        }
    }
    ProductSearch { r, s, value }
}

/// Alternating minimum-eigenvector search. The first run starts from the
/// leading Schmidt vector of `G`'s minimum eigenvector, the others from
/// seeded random vectors; ties go to the earliest run.
pub fn min_product_vector(
    g: &Matrix,
    dims: BipartiteDims,
    restarts: usize,
    seed: u64,
) -> ProductSearch {
    let e = jacobi_eigh(g);
    let v = e.vector(0);
    let m = Matrix::reshape_vec(&v, dims.d1, dims.d2).expect("side matches dims");
    let r0 = jacobi_eigh(&(&m * &m.adjoint())).vector(dims.d1 - 1);
    let mut best = alternate(g, dims, r0);
    for k in 1..restarts.max(1) {
        let mut rng = seeded(restart_seed(seed, k as u64));
        let cand = alternate(g, dims, random_unit_vector(&mut rng, dims.d1));
        if cand.value < best.value {
            best = cand;
        }
    }
    best
}

fn unitary_value(g: &Matrix, w: &Matrix) -> f64 {
    quad(g, w.data()) / w.rows() as f64
}

fn ascend_unitary(g: &Matrix, a: &Matrix, mut w: Matrix) -> (Matrix, f64) {
    let d = w.rows();
    let scale = g.max_abs().max(1e-300);
    let mut value = unitary_value(g, &w);
    for _ in 0..2000 {
        let m = Matrix::reshape_vec(&a.mul_vec(w.data()), d, d).expect("square");
        let next = polar_unitary(&m).or_else(|| {
            // rank-deficient step: any completion increases the bound, nudge toward w
            polar_unitary(&(&m + &w.scale(1e-9 * m.frobenius().max(1e-300))))
        });
        let Some(next) = next else { break };
        let v = unitary_value(g, &next);
        let stalled = v >= value - 1e-15 * scale;
        if v < value {
            w = next;
            value = v;
        }
        if stalled {
            break;
        }
    }
    (w, value)
}

/// Minimizes `vec(W)† G vec(W) / d` over unitary `W` by the majorize-minimize
/// iteration `W ← polar(reshape((sI − G) vec W))`, `s = λ_max(G)`, which is a
/// projected gradient step followed by the polar retraction.
pub fn min_unitary_vector(g: &Matrix, d: usize, restarts: usize, seed: u64) -> (Matrix, f64) {
    let e = jacobi_eigh(g);
    let s = e.max_value().max(0.0) + 1e-12 * g.max_abs();
    let a = &Matrix::identity(g.rows()).scale(s) - g;
    let start = Matrix::reshape_vec(&e.vector(0), d, d).expect("square");
    let start = polar_unitary(&start)
        .or_else(|| polar_unitary(&(&start + &Matrix::identity(d).scale(1e-6))))
        .unwrap_or_else(|| Matrix::identity(d));
    let mut best = ascend_unitary(g, &a, start);
    for k in 1..restarts.max(1) {
        let mut rng = seeded(restart_seed(seed, k as u64));
        let cand = ascend_unitary(g, &a, random_unitary(&mut rng, d));
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}
