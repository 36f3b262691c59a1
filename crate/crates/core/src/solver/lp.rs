//! Transport feasibility for commuting families: find `D ≥ 0` with `aᵏ D = bᵏ`
//! for every pair, optionally row stochastic, by a dense phase-one simplex.

use crate::error::{dim_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// `plan[p][q]`, an `n × m` nonnegative matrix.
    Feasible { plan: Vec<Vec<f64>> },
    /// Farkas vector `y` over the equations (pairs `(k, q)` in order, then one
    /// row-sum equation per `p` if stochastic) with `Aᵀy ≤ 0` and `bᵀy > 0`.
    Infeasible { certificate: Vec<f64>, infeasibility: f64 },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

struct System {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

fn build(a_rows: &[Vec<f64>], b_rows: &[Vec<f64>], stochastic: bool) -> Result<(System, usize, usize)> {
    if a_rows.is_empty() || a_rows.len() != b_rows.len() {
        return dim_err(format!(
            "{} input vectors and {} output vectors",
            a_rows.len(),
            b_rows.len()
        ));
    }
    let n = a_rows[0].len();
    let m = b_rows[0].len();
    if n == 0 || m == 0 {
        return dim_err("empty spectrum vectors");
    }
    if a_rows.iter().any(|r| r.len() != n) || b_rows.iter().any(|r| r.len() != m) {
        return dim_err("spectrum vectors of inconsistent lengths");
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (ak, bk) in a_rows.iter().zip(b_rows) {
        for q in 0..m {
            let mut row = vec![0.0; n * m];
            for p in 0..n {
                row[p * m + q] = ak[p];
            }
            a.push(row);
            b.push(bk[q]);
        }
    }
    if stochastic {
        for p in 0..n {
            let mut row = vec![0.0; n * m];
            for q in 0..m {
                row[p * m + q] = 1.0;
            }
            a.push(row);
            b.push(1.0);
        }
    }
    Ok((System { a, b }, n, m))
}

pub fn lp_oracle(a_rows: &[Vec<f64>], b_rows: &[Vec<f64>], stochastic: bool) -> Result<LpOutcome> {
    let (sys, n, m) = build(a_rows, b_rows, stochastic)?;
    let rows = sys.b.len();
    let vars = n * m;
    let width = vars + rows + 1;
    let rhs = width - 1;
    // rows with negative right-hand side are negated so artificials start feasible
    let signs: Vec<f64> = sys.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = vec![vec![0.0; width]; rows + 1];
    for r in 0..rows {
        for j in 0..vars {
            t[r][j] = signs[r] * sys.a[r][j];
        }
        t[r][vars + r] = 1.0;
        t[r][rhs] = signs[r] * sys.b[r];
    }
    for j in 0..width {
        if j >= vars && j < vars + rows {
            continue;
        }
        t[rows][j] = -(0..rows).map(|r| t[r][j]).sum::<f64>();
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();
    let scale = sys.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let eps = 1e-11;

    for _ in 0..50_000 {
        // Bland: lowest-index improving column
        let Some(pc) = (0..vars + rows).find(|&j| t[rows][j] < -eps) else { break };
        let mut pr: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            if t[r][pc] > eps {
                let ratio = t[r][rhs] / t[r][pc];
                let better = ratio < best - 1e-14
                    || (ratio <= best + 1e-14 && pr.is_some_and(|p| basis[r] < basis[p]));
                if better {
                    best = ratio;
                    pr = Some(r);
                }
            }
        }
        let Some(pr) = pr else { break };
        let piv = t[pr][pc];
        for v in t[pr].iter_mut() {
            *v /= piv;
        }
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let f = row[pc];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
        basis[pr] = pc;
    }

    let infeasibility = -t[rows][rhs];
    if infeasibility <= 1e-9 * scale {
        let mut x = vec![0.0; vars];
        for (r, &j) in basis.iter().enumerate() {
            if j < vars {
                x[j] = t[r][rhs].max(0.0);
            }
        }
        let plan = (0..n).map(|p| x[p * m..(p + 1) * m].to_vec()).collect();
        return Ok(LpOutcome::Feasible { plan });
    }
    // reduced cost of artificial r is 1 − y_r
    let certificate = (0..rows)
        .map(|r| signs[r] * (1.0 - t[rows][vars + r]))
        .collect();
    Ok(LpOutcome::Infeasible {
        certificate,
        infeasibility,
    })
}
