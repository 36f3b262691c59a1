//! Small dense real least-squares routines.

use nalgebra::{DMatrix, DVector};

/// Least-squares solution of `A x = b` (minimum norm when rank deficient).
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.max();
    let eps = (top * 1e-13).max(1e-300);
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Lawson–Hanson nonnegative least squares: `min ‖A x − b‖` over `x ≥ 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    if n == 0 {
        return x;
    }
    let mut passive = vec![false; n];
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tol = 1e-12 * scale * b.norm().max(1.0) * (n as f64);
    for _outer in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let cand = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = cand else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(&idx);
            let z = lstsq(&sub, b);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            // step back to the boundary of the feasible region
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let t = x[i] / (x[i] - z[k]);
                    alpha = alpha.min(t);
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
                if x[i] <= 1e-15 * scale {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

/// Levenberg step `δ = −(JᵀJ + λI)⁻¹ Jᵀ r`, using the smaller of the two
/// equivalent normal systems.
pub(crate) fn damped_step(j: &DMatrix<f64>, r: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let (m, p) = (j.nrows(), j.ncols());
    if p <= m {
        let mut h = j.transpose() * j;
        for k in 0..p {
            h[(k, k)] += lambda;
        }
        let g = j.transpose() * r;
        match h.clone().cholesky() {
            Some(ch) => -ch.solve(&g),
            None => -lstsq(&h, &g),
        }
    } else {
        let mut h = j * j.transpose();
        for k in 0..m {
            h[(k, k)] += lambda;
        }
        let y = match h.clone().cholesky() {
            Some(ch) => ch.solve(r),
            None => lstsq(&h, r),
        };
        -(j.transpose() * y)
    }
}

/// Euclidean projection onto `{x ≥ 0, Σ x ≤ cap}`.
pub(crate) fn project_capped_simplex(y: &[f64], cap: f64) -> Vec<f64> {
    let z: Vec<f64> = y.iter().map(|v| v.max(0.0)).collect();
    if z.iter().sum::<f64>() <= cap {
        return z;
    }
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        acc += v;
        let t = (acc - cap) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}
