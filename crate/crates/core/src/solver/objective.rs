//! Objectives that depend on the Choi matrix only through linear images of it.

use crate::channel::apply_choi_raw;
use crate::cone::program::{InterpolationProblem, ProgramSpec};
use crate::matrix::{jacobi_eigh, partial_trace, tensor_product, BipartiteDims, Factor, Matrix};

pub(crate) trait LinearObjective {
    fn dims(&self) -> BipartiteDims;
    /// Linear images ("feature blocks") of a Choi-sized matrix.
    fn features(&self, m: &Matrix) -> Vec<Matrix>;
    fn value(&self, f: &[Matrix]) -> f64;
    /// Smoothed value and its gradient with respect to the feature blocks.
    fn smoothed(&self, f: &[Matrix], mu: f64) -> (f64, Vec<Matrix>);
    /// Adjoint of `features`.
    fn adjoint(&self, g: &[Matrix]) -> Matrix;
    /// Linear part of the stacked least-squares residual.
    fn ls_linear(&self, f: &[Matrix]) -> Vec<f64>;
    /// Constant the linear part must reach for a zero value.
    fn ls_target(&self) -> Vec<f64>;
    fn mu0(&self) -> f64;

    fn ls_residual(&self, f: &[Matrix]) -> Vec<f64> {
        let mut r = self.ls_linear(f);
        for (a, b) in r.iter_mut().zip(self.ls_target()) {
            *a -= b;
        }
        r
    }
}

pub(crate) fn huber(lambda: f64, mu: f64) -> f64 {
    let a = lambda.abs();
    if a <= mu {
        lambda * lambda / (2.0 * mu)
    } else {
        a - mu / 2.0
    }
}

/// Huber-smoothed trace norm and its gradient.
pub(crate) fn smooth_trace_norm(r: &Matrix, mu: f64) -> (f64, Matrix) {
    let e = jacobi_eigh(r);
    let v = e.values.iter().map(|&l| huber(l, mu)).sum();
    (v, e.map(|l| (l / mu).clamp(-1.0, 1.0)))
}

/// `μ log Σ (e^{λ/μ} + e^{−λ/μ})`, a smooth upper bound on `‖M‖_op`, and its gradient.
pub(crate) fn smooth_operator_norm(m: &Matrix, mu: f64) -> (f64, Matrix) {
    let e = jacobi_eigh(m);
    let top = e.values.iter().map(|l| l.abs()).fold(0.0, f64::max) / mu;
    let mut z = 0.0;
    for &l in &e.values {
        z += (l / mu - top).exp() + (-l / mu - top).exp();
    }
    let v = mu * (top + z.ln());
    let g = e.map(|l| ((l / mu - top).exp() - (-l / mu - top).exp()) / z);
    (v, g)
}

pub(crate) struct InterpObjective {
    x: Vec<Matrix>,
    xt: Vec<Matrix>,
    y: Vec<Matrix>,
    dout: usize,
    din: usize,
    /// Weight on `‖tr_1 C − I‖_op`; zero drops the trace condition.
    w: f64,
    mu0: f64,
}

impl InterpObjective {
    pub(crate) fn new(problem: &InterpolationProblem, w: f64) -> Self {
        InterpObjective {
            x: problem.x().to_vec(),
            xt: problem.x().iter().map(Matrix::transpose).collect(),
            y: problem.y().to_vec(),
            dout: problem.out_dim(),
            din: problem.in_dim(),
            w,
            mu0: 0.1 * problem.output_mass().max(1.0),
        }
    }

    pub(crate) fn for_spec(spec: &ProgramSpec) -> Self {
        InterpObjective::new(&spec.problem, spec.penalty_weight())
    }
}

impl LinearObjective for InterpObjective {
    fn dims(&self) -> BipartiteDims {
        BipartiteDims::new(self.dout, self.din)
    }

    fn features(&self, m: &Matrix) -> Vec<Matrix> {
        let mut f: Vec<Matrix> = self
            .x
            .iter()
            .map(|x| apply_choi_raw(m, self.dout, self.din, x))
            .collect();
        f.push(partial_trace(m, Factor::First, self.dims()).expect("Choi-sized input"));
        f
    }

    fn value(&self, f: &[Matrix]) -> f64 {
        let n = self.y.len();
        let mut v = 0.0;
        for (fi, y) in f[..n].iter().zip(&self.y) {
            v += jacobi_eigh(&(fi - y)).values.iter().map(|l| l.abs()).sum::<f64>();
        }
        if self.w > 0.0 {
            let m = &f[n] - &Matrix::identity(self.din);
            let op = jacobi_eigh(&m).values.iter().map(|l| l.abs()).fold(0.0, f64::max);
            v += self.w * op;
        }
        v
    }

    fn smoothed(&self, f: &[Matrix], mu: f64) -> (f64, Vec<Matrix>) {
        let n = self.y.len();
        let mut v = 0.0;
        let mut g = Vec::with_capacity(n + 1);
        for (fi, y) in f[..n].iter().zip(&self.y) {
            let (hv, hg) = smooth_trace_norm(&(fi - y), mu);
            v += hv;
            g.push(hg);
        }
        if self.w > 0.0 {
            let (ov, og) = smooth_operator_norm(&(&f[n] - &Matrix::identity(self.din)), mu);
            v += self.w * ov;
            g.push(og.scale(self.w));
        } else {
            g.push(Matrix::zeros(self.din, self.din));
        }
        (v, g)
    }

    fn adjoint(&self, g: &[Matrix]) -> Matrix {
        let n = self.y.len();
        let mut out = tensor_product(&Matrix::identity(self.dout), &g[n]);
        for (gi, xt) in g[..n].iter().zip(&self.xt) {
            out += &tensor_product(gi, xt);
        }
        out
    }

    fn ls_linear(&self, f: &[Matrix]) -> Vec<f64> {
        let n = self.y.len();
        let mut r: Vec<f64> = f[..n].iter().flat_map(|m| m.hermitian_coords()).collect();
        if self.w > 0.0 {
            r.extend(f[n].hermitian_coords());
        }
        r
    }

    fn ls_target(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.y.iter().flat_map(|m| m.hermitian_coords()).collect();
        if self.w > 0.0 {
            r.extend(Matrix::identity(self.din).hermitian_coords());
        }
        r
    }

    fn mu0(&self) -> f64 {
        self.mu0
    }
}

/// `‖C − C₀‖_F`, for conic decompositions of a given matrix.
pub(crate) struct MembershipObjective {
    target: Matrix,
    dims: BipartiteDims,
}

impl MembershipObjective {
    pub(crate) fn new(target: Matrix, dims: BipartiteDims) -> Self {
        MembershipObjective { target, dims }
    }
}

impl LinearObjective for MembershipObjective {
    fn dims(&self) -> BipartiteDims {
        self.dims
    }

    fn features(&self, m: &Matrix) -> Vec<Matrix> {
        vec![m.clone()]
    }

    fn value(&self, f: &[Matrix]) -> f64 {
        (&f[0] - &self.target).frobenius()
    }

    fn smoothed(&self, f: &[Matrix], _mu: f64) -> (f64, Vec<Matrix>) {
        let r = &f[0] - &self.target;
        (0.5 * r.frobenius().powi(2), vec![r])
    }

    fn adjoint(&self, g: &[Matrix]) -> Matrix {
        g[0].clone()
    }

    fn ls_linear(&self, f: &[Matrix]) -> Vec<f64> {
        f[0].hermitian_coords()
    }

    fn ls_target(&self) -> Vec<f64> {
        self.target.hermitian_coords()
    }

    fn mu0(&self) -> f64 {
        1.0
    }
}
