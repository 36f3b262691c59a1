//! Local refinement of an atom set over the atoms' own parameters.
//!
//! Levenberg–Marquardt drives the least-squares residual to zero on feasible
//! instances; L-BFGS on the smoothed objective sharpens infeasible ones.

use nalgebra::{DMatrix, DVector};

use crate::cone::atom::AtomPayload;
use crate::cone::program::ConeSpec;
use crate::matrix::{
    expi_hermitian, jacobi_eigh, real_pairing, tensor_product, vnorm, Matrix, C64,
};
use crate::solver::linalg::damped_step;
use crate::solver::objective::LinearObjective;

/// An atom with unnormalized parameters; its matrix carries the weight.
#[derive(Debug, Clone)]
pub(crate) enum ParamAtom {
    /// `vv†`
    Ray { v: Vec<C64> },
    /// `aa† ⊗ bb†`
    Product { a: Vec<C64>, b: Vec<C64> },
    /// `s² |vec W⟩⟨vec W|`, moved as `W exp(iH)`
    Unitary { w: Matrix, s: f64 },
    /// `s² Pₖ`
    Generator { index: usize, s: f64 },
}

fn top_vector(m: &Matrix) -> Vec<C64> {
    let e = jacobi_eigh(m);
    e.vector(e.values.len() - 1)
}

fn sym_outer(u: &[C64], v: &[C64]) -> Matrix {
    &Matrix::outer(u, v) + &Matrix::outer(v, u)
}

impl ParamAtom {
    /// From a payload carrying trace weight `q`.
    pub(crate) fn from_payload(payload: &AtomPayload, q: f64, cone: &ConeSpec) -> Self {
        let q = q.max(0.0);
        match payload {
            AtomPayload::Ray { v } => ParamAtom::Ray {
                v: v.iter().map(|z| z * q.sqrt()).collect(),
            },
            AtomPayload::Product { output, input } => {
                let r = q.powf(0.25);
                ParamAtom::Product {
                    a: top_vector(output).iter().map(|z| z * r).collect(),
                    b: top_vector(input).iter().map(|z| z * r).collect(),
                }
            }
            AtomPayload::Unitary { u } => ParamAtom::Unitary {
                w: u.adjoint(),
                s: (q / u.rows() as f64).sqrt(),
            },
            AtomPayload::Generator { index } => ParamAtom::Generator {
                index: *index,
                s: (q / cone.generators()[*index].trace().re).sqrt(),
            },
        }
    }

    /// Normalized payload and its trace weight.
    pub(crate) fn to_payload(&self, cone: &ConeSpec) -> (AtomPayload, f64) {
        match self {
            ParamAtom::Ray { v } => {
                let n = vnorm(v);
                let unit = if n > 0.0 { v.iter().map(|z| z / n).collect() } else { v.clone() };
                (AtomPayload::Ray { v: unit }, n * n)
            }
            ParamAtom::Product { a, b } => {
                let (na, nb) = (vnorm(a), vnorm(b));
                let norm = |v: &[C64], n: f64| -> Vec<C64> {
                    if n > 0.0 {
                        v.iter().map(|z| z / n).collect()
                    } else {
                        v.to_vec()
                    }
                };
                (
                    AtomPayload::Product {
                        output: Matrix::ket_bra(&norm(a, na)),
                        input: Matrix::ket_bra(&norm(b, nb)),
                    },
                    (na * nb).powi(2),
                )
            }
            ParamAtom::Unitary { w, s } => (
                AtomPayload::Unitary { u: w.adjoint() },
                s * s * w.rows() as f64,
            ),
            ParamAtom::Generator { index, s } => (
                AtomPayload::Generator { index: *index },
                s * s * cone.generators()[*index].trace().re,
            ),
        }
    }

    pub(crate) fn matrix(&self, cone: &ConeSpec) -> Matrix {
        match self {
            ParamAtom::Ray { v } => Matrix::ket_bra(v),
            ParamAtom::Product { a, b } => tensor_product(&Matrix::ket_bra(a), &Matrix::ket_bra(b)),
            ParamAtom::Unitary { w, s } => Matrix::ket_bra(w.data()).scale(s * s),
            ParamAtom::Generator { index, s } => cone.generators()[*index].scale(s * s),
        }
    }

    /// Derivatives of `matrix` along each real parameter. With `rotations`
    /// false a unitary atom only exposes its weight.
    pub(crate) fn directions(&self, cone: &ConeSpec, rotations: bool) -> Vec<Matrix> {
        let i = C64::new(0.0, 1.0);
        let unit_dirs = |v: &[C64]| -> Vec<Matrix> {
            let mut out = Vec::with_capacity(2 * v.len());
            for k in 0..v.len() {
                for z in [C64::new(1.0, 0.0), i] {
                    let mut e = vec![C64::new(0.0, 0.0); v.len()];
                    e[k] = z;
                    out.push(sym_outer(&e, v));
                }
            }
            out
        };
        match self {
            ParamAtom::Ray { v } => unit_dirs(v),
            ParamAtom::Product { a, b } => {
                let (pa, pb) = (Matrix::ket_bra(a), Matrix::ket_bra(b));
                let mut out: Vec<Matrix> =
                    unit_dirs(a).iter().map(|da| tensor_product(da, &pb)).collect();
                out.extend(unit_dirs(b).iter().map(|db| tensor_product(&pa, db)));
                out
            }
            ParamAtom::Unitary { w, s } => {
                let d = w.rows();
                let mut out = Vec::with_capacity(d * d + 1);
                if rotations {
                    for k in 0..d * d {
                        let mut coords = vec![0.0; d * d];
                        coords[k] = 1.0;
                        let h = Matrix::from_hermitian_coords(d, &coords);
                        let dw = (w * &h).scale_c(i);
                        out.push(sym_outer(dw.data(), w.data()).scale(s * s));
                    }
                }
                out.push(Matrix::ket_bra(w.data()).scale(2.0 * s));
                out
            }
            ParamAtom::Generator { index, s } => vec![cone.generators()[*index].scale(2.0 * s)],
        }
    }

    pub(crate) fn nparams(&self, rotations: bool) -> usize {
        match self {
            ParamAtom::Ray { v } => 2 * v.len(),
            ParamAtom::Product { a, b } => 2 * (a.len() + b.len()),
            ParamAtom::Unitary { w, .. } => {
                if rotations {
                    w.rows() * w.rows() + 1
                } else {
                    1
                }
            }
            ParamAtom::Generator { .. } => 1,
        }
    }

    pub(crate) fn step(&mut self, delta: &[f64], rotations: bool) {
        let shift = |v: &mut [C64], d: &[f64]| {
            for (k, z) in v.iter_mut().enumerate() {
                *z += C64::new(d[2 * k], d[2 * k + 1]);
            }
        };
        match self {
            ParamAtom::Ray { v } => shift(v, delta),
            ParamAtom::Product { a, b } => {
                let na = 2 * a.len();
                shift(a, &delta[..na]);
                shift(b, &delta[na..]);
            }
            ParamAtom::Unitary { w, s } => {
                let d = w.rows();
                if rotations {
                    let h = Matrix::from_hermitian_coords(d, &delta[..d * d]);
                    *w = &*w * &expi_hermitian(&h);
                    *s += delta[d * d];
                } else {
                    *s += delta[0];
                }
            }
            ParamAtom::Generator { s, .. } => *s += delta[0],
        }
    }
}

pub(crate) fn total_matrix(atoms: &[ParamAtom], cone: &ConeSpec) -> Matrix {
    let n = cone.dims.total();
    let mut c = Matrix::zeros(n, n);
    for a in atoms {
        c += &a.matrix(cone);
    }
    c
}

fn stepped(atoms: &[ParamAtom], delta: &[f64], rotations: bool) -> Vec<ParamAtom> {
    let mut out = atoms.to_vec();
    let mut off = 0;
    for a in out.iter_mut() {
        let p = a.nparams(rotations);
        a.step(&delta[off..off + p], rotations);
        off += p;
    }
    out
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Levenberg–Marquardt on `‖ls_residual‖²`; returns the refined atoms and the
/// final residual norm.
pub(crate) fn levenberg_marquardt(
    obj: &dyn LinearObjective,
    cone: &ConeSpec,
    start: &[ParamAtom],
    max_iter: usize,
) -> (Vec<ParamAtom>, f64) {
    let mut atoms = start.to_vec();
    let target_scale = 1.0 + sq(&obj.ls_target()).sqrt();
    let mut r = obj.ls_residual(&obj.features(&total_matrix(&atoms, cone)));
    let mut cost = sq(&r);
    let mut lambda = -1.0;
    let mut slow = 0;
    for _ in 0..max_iter {
        if cost.sqrt() <= 1e-14 * target_scale {
            break;
        }
        let cols: Vec<Vec<f64>> = atoms
            .iter()
            .flat_map(|a| a.directions(cone, true))
            .map(|dm| obj.ls_linear(&obj.features(&dm)))
            .collect();
        let (m, p) = (r.len(), cols.len());
        let j = DMatrix::from_fn(m, p, |row, col| cols[col][row]);
        let rv = DVector::from_vec(r.clone());
        if lambda < 0.0 {
            let top = cols.iter().map(|c| sq(c)).fold(0.0, f64::max);
            lambda = 1e-3 * top.max(1e-300);
        }
        let mut accepted = false;
        for _ in 0..30 {
            let delta = damped_step(&j, &rv, lambda);
            let trial = stepped(&atoms, delta.as_slice(), true);
            let tr = obj.ls_residual(&obj.features(&total_matrix(&trial, cone)));
            let tc = sq(&tr);
            if tc < cost {
                slow = if tc > cost * (1.0 - 1e-6) { slow + 1 } else { 0 };
                atoms = trial;
                r = tr;
                cost = tc;
                lambda = (lambda / 3.0).max(1e-300);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted || slow >= 50 {
            break;
        }
    }
    (atoms, cost.sqrt())
}

/// L-BFGS on the smoothed objective at fixed `mu`; unitary atoms only move
/// their weights. Returns the refined atoms.
pub(crate) fn lbfgs_smoothed(
    obj: &dyn LinearObjective,
    cone: &ConeSpec,
    start: &[ParamAtom],
    mu: f64,
    max_iter: usize,
) -> Vec<ParamAtom> {
    let eval = |atoms: &[ParamAtom]| -> (f64, Vec<f64>) {
        let c = total_matrix(atoms, cone);
        let (v, g) = obj.smoothed(&obj.features(&c), mu);
        let full = obj.adjoint(&g);
        let grad = atoms
            .iter()
            .flat_map(|a| a.directions(cone, false))
            .map(|dm| real_pairing(&full, &dm))
            .collect();
        (v, grad)
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut atoms = start.to_vec();
    let (mut f, mut g) = eval(&atoms);
    let mut mem: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let memory = 12;
    for it in 0..max_iter {
        let gnorm = sq(&g).sqrt();
        if gnorm <= 1e-13 * (1.0 + f.abs()) {
            break;
        }
        // two-loop recursion
        let mut dir: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &dir);
            for (d, yv) in dir.iter_mut().zip(y) {
                *d -= a * yv;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.last() {
            let gamma = dot(s, y) / dot(y, y);
            for d in dir.iter_mut() {
                *d *= gamma;
            }
        } else {
            let t = 1e-2 / gnorm.max(1e-300);
            for d in dir.iter_mut() {
                *d *= t * (1.0 + f.abs());
            }
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &dir);
            for (d, sv) in dir.iter_mut().zip(s) {
                *d += (a - b) * sv;
            }
        }
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            dir = g.iter().map(|x| -x * 1e-3 / gnorm.max(1e-300)).collect();
            slope = dot(&g, &dir);
            mem.clear();
        }
        let mut step = 1.0;
        let mut next = None;
        for _ in 0..40 {
            let delta: Vec<f64> = dir.iter().map(|d| d * step).collect();
            let trial = stepped(&atoms, &delta, false);
            let (tf, tg) = eval(&trial);
            if tf <= f + 1e-4 * step * slope {
                next = Some((trial, tf, tg, delta));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, tf, tg, s)) = next else { break };
        let y: Vec<f64> = tg.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * sq(&s).sqrt() * sq(&y).sqrt() {
            mem.push((s, y, 1.0 / sy));
            if mem.len() > memory {
                mem.remove(0);
            }
        }
        let gain = f - tf;
        atoms = trial;
        f = tf;
        g = tg;
        if gain <= 1e-15 * (1.0 + f.abs()) && it > 5 {
            break;
        }
    }
    atoms
}
