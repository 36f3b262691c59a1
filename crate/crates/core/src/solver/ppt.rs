//! The interpolation objective minimized over `{C ≥ 0, PT(C) ≥ 0}`, which at
//! 2⊗2 is exactly the separable cone. Used as an independent oracle for the
//! separable-cone solver.

use nalgebra::{DMatrix, DVector};

use crate::cone::program::{objective_unchecked, ProgramSpec};
use crate::error::{dim_err, Result};
use crate::matrix::{jacobi_eigh, partial_transpose, real_pairing, BipartiteDims, Factor, Matrix, C64};
use crate::random::{gaussian_vector, seeded};
use crate::solver::linalg::damped_step;
use crate::solver::objective::{InterpObjective, LinearObjective};
use crate::solver::SolveParams;

#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    /// Objective at `c`, in the program's trace mode.
    pub delta: f64,
    pub lambda: f64,
    pub c: Matrix,
    /// Smallest eigenvalue of `PT(c)`; nonnegative up to rounding.
    pub pt_min_eigenvalue: f64,
}

fn pt(m: &Matrix, dims: BipartiteDims) -> Matrix {
    partial_transpose(m, Factor::Second, dims).expect("dims fixed")
}

fn clip_psd(m: &Matrix) -> Matrix {
    jacobi_eigh(m).map(|l| l.max(0.0))
}

/// Dykstra's alternating projections onto PSD, PPT and the trace cap.
fn project(x: &Matrix, dims: BipartiteDims, cap: f64) -> Matrix {
    let n = x.rows();
    let mut cur = x.clone();
    let mut inc = [Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(n, n)];
    for _ in 0..60 {
        for (k, slot) in inc.iter_mut().enumerate() {
            let y = &cur + slot;
            let p = match k {
                0 => clip_psd(&y),
                1 => pt(&clip_psd(&pt(&y, dims)), dims),
                _ => {
                    let tr = y.trace().re;
                    if tr > cap {
                        let mut z = y.clone();
                        z.axpy(-(tr - cap) / n as f64, &Matrix::identity(n));
                        z
                    } else {
                        y.clone()
                    }
                }
            };
            *slot = &y - &p;
            cur = p;
        }
    }
    cur
}

/// Smallest shift `δ I` making both `C` and `PT(C)` PSD; `I` is PT invariant.
fn make_feasible(c: &Matrix, dims: BipartiteDims) -> Matrix {
    let c = c.hermitian_part();
    let lo = jacobi_eigh(&c)
        .min_value()
        .min(jacobi_eigh(&pt(&c, dims)).min_value());
    if lo >= 0.0 {
        return c;
    }
    let mut out = c;
    out.axpy(-lo, &Matrix::identity(out.rows()));
    out
}

fn factor(m: &Matrix, noise: f64, rng: &mut crate::random::SeededRng) -> Vec<Vec<C64>> {
    let e = jacobi_eigh(m);
    let n = m.rows();
    (0..n)
        .map(|k| {
            let l = e.values[k];
            if l > 1e-10 {
                e.vector(k).iter().map(|z| z * l.sqrt()).collect()
            } else {
                gaussian_vector(rng, n).iter().map(|z| z * noise).collect()
            }
        })
        .collect()
}

fn gram(cols: &[Vec<C64>], n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for v in cols {
        m += &Matrix::ket_bra(v);
    }
    m
}

/// Residual `[ls residual of VV†; PT(VV†) − ZZ†]`.
fn residual(obj: &InterpObjective, v: &[Vec<C64>], z: &[Vec<C64>], dims: BipartiteDims) -> Vec<f64> {
    let n = dims.total();
    let c = gram(v, n);
    let mut r = obj.ls_residual(&obj.features(&c));
    r.extend((&pt(&c, dims) - &gram(z, n)).hermitian_coords());
    r
}

fn shifted(cols: &[Vec<C64>], delta: &[f64]) -> Vec<Vec<C64>> {
    let n = cols.len();
    cols.iter()
        .enumerate()
        .map(|(k, v)| {
            v.iter()
                .enumerate()
                .map(|(i, z)| z + C64::new(delta[2 * (k * n + i)], delta[2 * (k * n + i) + 1]))
                .collect()
        })
        .collect()
}

/// Levenberg–Marquardt on the factored feasibility system.
fn polish(
    obj: &InterpObjective,
    mut v: Vec<Vec<C64>>,
    mut z: Vec<Vec<C64>>,
    dims: BipartiteDims,
) -> Vec<Vec<C64>> {
    let n = dims.total();
    let sym = |e: &[C64], w: &[C64]| &Matrix::outer(e, w) + &Matrix::outer(w, e);
    let mut r = residual(obj, &v, &z, dims);
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    let mut lambda = -1.0;
    for _ in 0..200 {
        if cost.sqrt() < 1e-15 {
            break;
        }
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(4 * n * n);
        for (which, set) in [&v, &z].into_iter().enumerate() {
            for w in set.iter() {
                for i in 0..n {
                    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                        let mut e = vec![C64::new(0.0, 0.0); n];
                        e[i] = unit;
                        let dm = sym(&e, w);
                        let col = if which == 0 {
                            let mut c = obj.ls_linear(&obj.features(&dm));
                            c.extend(pt(&dm, dims).hermitian_coords());
                            c
                        } else {
                            let mut c = vec![0.0; r.len() - n * n];
                            c.extend(dm.scale(-1.0).hermitian_coords());
                            c
                        };
                        cols.push(col);
                    }
                }
            }
        }
        let j = DMatrix::from_fn(r.len(), cols.len(), |row, col| cols[col][row]);
        if lambda < 0.0 {
            let top = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max);
            lambda = 1e-3 * top.max(1e-300);
        }
        let rv = DVector::from_vec(r.clone());
        let mut accepted = false;
        for _ in 0..30 {
            let d = damped_step(&j, &rv, lambda);
            let half = 2 * n * n;
            let (nv, nz) = (shifted(&v, &d.as_slice()[..half]), shifted(&z, &d.as_slice()[half..]));
            let nr = residual(obj, &nv, &nz, dims);
            let nc: f64 = nr.iter().map(|x| x * x).sum();
            if nc < cost {
                let slow = nc > cost * (1.0 - 1e-6);
                v = nv;
                z = nz;
                r = nr;
                cost = nc;
                lambda /= 3.0;
                accepted = !slow;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    v
}

pub fn ppt_constrained_oracle(spec: &ProgramSpec, params: &SolveParams) -> Result<PptReport> {
    params.validate()?;
    let dims = spec.problem.choi_dims();
    if dims != BipartiteDims::new(2, 2) {
        return dim_err(format!(
            "the PPT oracle is exact only for qubit channels, got {}⊗{}",
            dims.d1, dims.d2
        ));
    }
    let obj = InterpObjective::for_spec(spec);
    let n = dims.total();
    let cap = spec.trace_cap;
    let eval = |c: &Matrix| objective_unchecked(c, spec);

    // accelerated projected gradient on the smoothed objective
    let mut c = Matrix::identity(n).scale(spec.problem.in_dim() as f64 / n as f64);
    let mut best = make_feasible(&c, dims);
    let mut best_val = eval(&best).value;
    let mut lip = 1.0;
    let mut mu = obj.mu0();
    while mu > 1e-6 {
        let mut x = c.clone();
        let mut y = c.clone();
        let mut t = 1.0f64;
        for _ in 0..params.max_iter {
            let (fy, g) = obj.smoothed(&obj.features(&y), mu);
            let grad = obj.adjoint(&g);
            let next = loop {
                let cand = project(&(&y - &grad.scale(1.0 / lip)), dims, cap);
                let diff = &cand - &y;
                let model = fy + real_pairing(&grad, &diff) + 0.5 * lip * diff.frobenius().powi(2);
                let fc = obj.smoothed(&obj.features(&cand), mu).0;
                if fc <= model + 1e-12 * fy.abs().max(1.0) || lip > 1e12 {
                    break cand;
                }
                lip *= 2.0;
            };
            let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &next + &(&next - &x).scale((t - 1.0) / tn);
            x = next;
            t = tn;
            lip *= 0.95;
        }
        c = x;
        let feasible = make_feasible(&c, dims);
        let v = eval(&feasible).value;
        if v < best_val {
            best = feasible;
            best_val = v;
        }
        mu *= 0.1;
    }

    // factored polish drives feasible instances to zero residual
    let mut rng = seeded(params.seed ^ 0x0007_7AB1);
    let scale = 1e-3 * best.trace().re.max(1e-3).sqrt();
    let v0 = factor(&best, scale, &mut rng);
    let z0 = factor(&pt(&best, dims), scale, &mut rng);
    let v = polish(&obj, v0, z0, dims);
    let polished = make_feasible(&gram(&v, n), dims);
    if polished.trace().re <= cap {
        let pv = eval(&polished).value;
        if pv < best_val {
            best = polished;
        }
    }

    let ov = eval(&best);
    Ok(PptReport {
        delta: ov.value,
        lambda: ov.lambda,
        pt_min_eigenvalue: jacobi_eigh(&pt(&best, dims)).min_value(),
        c: best,
    })
}
