//! Dual program: `Γ = inf Σ tr[Yᵢᵀ Hᵢ]` over `Σ Xᵢ⊗Hᵢ ≥ 0`, `‖Hᵢ‖_op ≤ 1`.
//!
//! Every feasible point gives `Δ ≥ −Σ tr[Yᵢᵀ Hᵢ]` for the completely positive
//! program, so the returned value is always attained by a feasible point.

use crate::cone::program::InterpolationProblem;
use crate::matrix::{jacobi_eigh, partial_trace, real_pairing, tensor_product, BipartiteDims, Factor, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualParams {
    /// Accelerated gradient steps per penalty level.
    pub steps: usize,
    /// Penalty levels, each four times the previous.
    pub levels: usize,
}

impl Default for DualParams {
    fn default() -> Self {
        DualParams {
            steps: 400,
            levels: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaDual {
    /// `Σ tr[Yᵢᵀ Hᵢ]` at the feasible `witnesses`; an upper bound on `Γ`.
    pub gamma: f64,
    pub witnesses: Vec<Matrix>,
    /// `min(0, λ_min(Σ Xᵢ⊗Hᵢ))` at the witnesses; zero up to rounding.
    pub violation: f64,
}

struct Data<'a> {
    x: &'a [Matrix],
    yt: Vec<Matrix>,
    dims: BipartiteDims,
}

impl Data<'_> {
    fn stack(&self, h: &[Matrix]) -> Matrix {
        let n = self.dims.total();
        let mut m = Matrix::zeros(n, n);
        for (x, hi) in self.x.iter().zip(h) {
            m += &tensor_product(x, hi);
        }
        m
    }

    fn linear(&self, h: &[Matrix]) -> f64 {
        self.yt.iter().zip(h).map(|(y, hi)| real_pairing(y, hi)).sum()
    }

    /// Penalized smooth objective and gradient.
    fn eval(&self, h: &[Matrix], rho: f64, mu: f64) -> (f64, Vec<Matrix>) {
        let e = jacobi_eigh(&self.stack(h));
        let mut pen = 0.0;
        for &l in &e.values {
            if l < -mu {
                pen += -l - mu / 2.0;
            } else if l < 0.0 {
                pen += l * l / (2.0 * mu);
            }
        }
        let g = e.map(|l| {
            if l < -mu {
                -1.0
            } else if l < 0.0 {
                l / mu
            } else {
                0.0
            }
        });
        let d2 = self.dims.d2;
        let grads = self
            .x
            .iter()
            .zip(&self.yt)
            .map(|(x, y)| {
                let gx = &g * &tensor_product(x, &Matrix::identity(d2));
                let blk = partial_trace(&gx, Factor::First, self.dims).expect("sizes fixed");
                &y.clone() + &blk.hermitian_part().scale(rho)
            })
            .collect();
        (self.linear(h) + rho * pen, grads)
    }
}

fn clip_unit(h: &Matrix) -> Matrix {
    jacobi_eigh(h).map(|l| l.clamp(-1.0, 1.0))
}

/// `P = Σ cᵢXᵢ` positive definite, scored by `λ_min(P) / max|cᵢ|`.
fn interior_direction(x: &[Matrix]) -> Option<(Vec<f64>, f64)> {
    let n = x.len();
    let d = x[0].rows();
    let mut candidates: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for i in 0..n {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        candidates.push(c);
    }
    if let Some(c) = crate::solver::identity_coefficients(x) {
        candidates.push(c);
    }
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for c in candidates {
        let mut p = Matrix::zeros(d, d);
        for (ci, xi) in c.iter().zip(x) {
            p.axpy(*ci, xi);
        }
        let lmin = jacobi_eigh(&p).min_value();
        let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if lmin <= 0.0 || cmax == 0.0 {
            continue;
        }
        let score = lmin / cmax;
        if best.as_ref().is_none_or(|b| score > b.2) {
            best = Some((c, lmin, score));
        }
    }
    best.map(|(c, lmin, _)| (c, lmin))
}

/// Moves `h` into the feasible set along an interior direction.
fn restore(data: &Data, h: &[Matrix], interior: &Option<(Vec<f64>, f64)>) -> Option<Vec<Matrix>> {
    let lmin = jacobi_eigh(&data.stack(h)).min_value();
    if lmin >= 0.0 {
        return Some(h.to_vec());
    }
    let (c, pmin) = interior.as_ref()?;
    // Σ Xᵢ⊗(Hᵢ + t cᵢ I) ≥ Σ Xᵢ⊗Hᵢ + t λ_min(P) I
    let t = -lmin / pmin * (1.0 + 1e-12);
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d2 = data.dims.d2;
    let s = 1.0 / (1.0 + t * cmax);
    Some(
        h.iter()
            .zip(c)
            .map(|(hi, ci)| {
                let mut m = hi.clone();
                m.axpy(t * ci, &Matrix::identity(d2));
                m.scale(s)
            })
            .collect(),
    )
}

pub fn gamma_dual(problem: &InterpolationProblem, params: &DualParams) -> GammaDual {
    let data = Data {
        x: problem.x(),
        yt: problem.y().iter().map(Matrix::transpose).collect(),
        dims: BipartiteDims::new(problem.in_dim(), problem.out_dim()),
    };
    let d2 = problem.out_dim();
    let n = problem.len();
    let interior = interior_direction(problem.x());

    let zero = vec![Matrix::zeros(d2, d2); n];
    let mut best = (0.0, zero.clone());
    let mut h = zero;
    let mut rho = 1.0;
    let mut lip = 1.0;
    for _level in 0..params.levels {
        let mu = 0.05 / rho;
        let mut x = h.clone();
        let mut y = h.clone();
        let mut t = 1.0f64;
        for _ in 0..params.steps {
            let (fy, gy) = data.eval(&y, rho, mu);
            let next = loop {
                let cand: Vec<Matrix> = y
                    .iter()
                    .zip(&gy)
                    .map(|(a, g)| clip_unit(&(a - &g.scale(1.0 / lip))))
                    .collect();
                let (fc, _) = data.eval(&cand, rho, mu);
                let mut model = fy;
                let mut dist = 0.0;
                for ((c, a), g) in cand.iter().zip(&y).zip(&gy) {
                    let diff = c - a;
                    model += real_pairing(g, &diff);
                    dist += diff.frobenius().powi(2);
                }
                model += 0.5 * lip * dist;
                if fc <= model + 1e-13 * fy.abs().max(1.0) || lip > 1e14 {
                    break cand;
                }
                lip *= 2.0;
            };
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            y = next
                .iter()
                .zip(&x)
                .map(|(a, b)| clip_unit(&(a + &(a - b).scale(beta))))
                .collect();
            x = next;
            t = t_next;
            lip *= 0.97;
        }
        h = x;
        if let Some(feasible) = restore(&data, &h, &interior) {
            let v = data.linear(&feasible);
            if v < best.0 {
                best = (v, feasible);
            }
        }
        rho *= 4.0;
    }
    let violation = jacobi_eigh(&data.stack(&best.1)).min_value().min(0.0);
    GammaDual {
        gamma: best.0,
        witnesses: best.1,
        violation,
    }
}
