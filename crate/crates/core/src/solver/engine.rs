//! Fully-corrective Frank–Wolfe over a trace-capped cone.

use nalgebra::{DMatrix, DVector};

use crate::cone::atom::AtomPayload;
use crate::cone::lmo::{lmo_seeded, restart_seed};
use crate::cone::program::{ConeKind, ConeSpec};
use crate::matrix::{jacobi_eigh, real_pairing, Matrix};
use crate::random::{gaussian_vector, seeded};
use crate::solver::linalg::{nnls, project_capped_simplex};
use crate::solver::objective::LinearObjective;
use crate::solver::refine::{lbfgs_smoothed, levenberg_marquardt, ParamAtom};
use crate::solver::StepRule;

const MAX_ACTIVE: usize = 50;
const DROP_WEIGHT: f64 = 1e-12;
const INNER_STEPS: usize = 200;
const PATIENCE: usize = 25;

pub(crate) struct EngineOptions {
    pub max_iter: usize,
    /// Stop once the true value reaches this level.
    pub target: f64,
    pub step_rule: StepRule,
    pub seed: u64,
    pub cap: f64,
    pub refine: bool,
}

pub(crate) struct EngineOutput {
    /// Normalized payloads with trace weights.
    pub atoms: Vec<(AtomPayload, f64)>,
    pub history: Vec<f64>,
    pub iterations: usize,
}

struct Active {
    payload: AtomPayload,
    /// Unit-trace realization.
    unit: Matrix,
    feats: Vec<Matrix>,
}

struct State<'a> {
    obj: &'a dyn LinearObjective,
    cone: &'a ConeSpec,
    zero: Vec<Matrix>,
    active: Vec<Active>,
    q: Vec<f64>,
    value: f64,
    lipschitz: f64,
}

fn combine(zero: &[Matrix], active: &[Active], q: &[f64]) -> Vec<Matrix> {
    let mut f = zero.to_vec();
    for (a, &w) in active.iter().zip(q) {
        if w != 0.0 {
            for (fb, ab) in f.iter_mut().zip(&a.feats) {
                fb.axpy(w, ab);
            }
        }
    }
    f
}

impl<'a> State<'a> {
    fn make_active(&self, payload: AtomPayload) -> (Active, f64) {
        let tr = payload.trace(self.cone);
        let unit = payload.realize(self.cone).scale(1.0 / tr);
        let feats = self.obj.features(&unit);
        (
            Active {
                payload,
                unit,
                feats,
            },
            tr,
        )
    }

    fn eval(&self, q: &[f64]) -> f64 {
        self.obj.value(&combine(&self.zero, &self.active, q))
    }

    fn smoothed(&self, q: &[f64], mu: f64) -> (f64, Vec<f64>) {
        let (v, g) = self.obj.smoothed(&combine(&self.zero, &self.active, q), mu);
        let grad = self
            .active
            .iter()
            .map(|a| a.feats.iter().zip(&g).map(|(x, y)| real_pairing(x, y)).sum())
            .collect();
        (v, grad)
    }

    fn matrix(&self) -> Matrix {
        let n = self.cone.dims.total();
        let mut c = Matrix::zeros(n, n);
        for (a, &w) in self.active.iter().zip(&self.q) {
            c.axpy(w, &a.unit);
        }
        c
    }

    /// Index of an existing atom realizing the same matrix.
    fn find(&self, unit: &Matrix) -> Option<usize> {
        self.active
            .iter()
            .position(|a| (&a.unit - unit).max_abs() <= 1e-12)
    }

    /// Accelerated projected gradient on the weights at smoothing level `mu`.
    fn reweight(&mut self, q0: &[f64], mu: f64, cap: f64) -> Vec<f64> {
        let mut x = q0.to_vec();
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut lip = self.lipschitz;
        for _ in 0..INNER_STEPS {
            let (fy, gy) = self.smoothed(&y, mu);
            let next = loop {
                let cand: Vec<f64> = project_capped_simplex(
                    &y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect::<Vec<_>>(),
                    cap,
                );
                let (fc, _) = self.smoothed(&cand, mu);
                let mut model = fy;
                let mut dist = 0.0;
                for ((c, a), g) in cand.iter().zip(&y).zip(&gy) {
                    model += g * (c - a);
                    dist += (c - a) * (c - a);
                }
                model += 0.5 * lip * dist;
                if fc <= model + 1e-14 * fy.abs().max(1.0) || lip > 1e16 {
                    break cand;
                }
                lip *= 2.0;
            };
            let moved: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = next
                .iter()
                .zip(&x)
                .map(|(n, o)| (n + (t - 1.0) / t_next * (n - o)).max(0.0))
                .collect();
            let ysum: f64 = y.iter().sum();
            if ysum > cap {
                y = project_capped_simplex(&y, cap);
            }
            x = next;
            t = t_next;
            lip *= 0.95;
            if moved <= 1e-15 * cap {
                break;
            }
        }
        self.lipschitz = lip.max(1e-8);
        x
    }

    /// Nonnegative least squares on the linear residual over the active atoms.
    fn least_squares_weights(&self, cap: f64) -> Vec<f64> {
        let target = self.obj.ls_target();
        let base = self.obj.ls_linear(&self.zero);
        let cols: Vec<Vec<f64>> = self
            .active
            .iter()
            .map(|a| {
                let mut c = self.obj.ls_linear(&a.feats);
                for (v, b) in c.iter_mut().zip(&base) {
                    *v -= b;
                }
                c
            })
            .collect();
        let m = target.len();
        let a = DMatrix::from_fn(m, cols.len(), |r, c| cols[c][r]);
        let b = DVector::from_fn(m, |r, _| target[r] - base[r]);
        let q: Vec<f64> = nnls(&a, &b).iter().copied().collect();
        project_capped_simplex(&q, cap)
    }

    fn try_accept(&mut self, q: Vec<f64>) -> bool {
        let v = self.eval(&q);
        if v < self.value {
            self.q = q;
            self.value = v;
            true
        } else {
            false
        }
    }

    fn prune(&mut self) {
        let mut keep: Vec<usize> = (0..self.active.len())
            .filter(|&k| self.q[k] > DROP_WEIGHT)
            .collect();
        if keep.len() > MAX_ACTIVE {
            keep.sort_by(|&a, &b| self.q[b].total_cmp(&self.q[a]));
            keep.truncate(MAX_ACTIVE);
            keep.sort_unstable();
        }
        if keep.len() == self.active.len() {
            return;
        }
        let forced = self.active.len() > MAX_ACTIVE;
        let trial: Vec<f64> = (0..self.q.len())
            .map(|k| if keep.contains(&k) { self.q[k] } else { 0.0 })
            .collect();
        let v = self.eval(&trial);
        // dropping tiny weights may raise the value by rounding; keep them then
        if v > self.value && !forced {
            return;
        }
        let old = std::mem::take(&mut self.active);
        let oldq = std::mem::take(&mut self.q);
        for (k, a) in old.into_iter().enumerate() {
            if keep.contains(&k) {
                self.active.push(a);
                self.q.push(oldq[k]);
            }
        }
        self.value = v.min(self.eval(&self.q));
    }

    fn param_atoms(&self, rng_seed: u64) -> Vec<ParamAtom> {
        if self.cone.kind == ConeKind::Psd {
            // a full-rank factor lets the local solver reach any PSD matrix
            let c = self.matrix();
            let e = jacobi_eigh(&c);
            let top = e.max_value().max(0.0);
            let mut rng = seeded(rng_seed);
            let n = c.rows();
            return (0..n)
                .map(|k| {
                    let lam = e.values[k];
                    let v = if lam > 1e-12 * top && lam > 0.0 {
                        e.vector(k).iter().map(|z| z * lam.sqrt()).collect()
                    } else {
                        let scale = 1e-4 * top.max(1e-6).sqrt() / (n as f64).sqrt();
                        gaussian_vector(&mut rng, n).iter().map(|z| z * scale).collect()
                    };
                    ParamAtom::Ray { v }
                })
                .collect();
        }
        self.active
            .iter()
            .zip(&self.q)
            .map(|(a, &w)| ParamAtom::from_payload(&a.payload, w, self.cone))
            .collect()
    }

    /// Replaces the active set with refined atoms when that lowers the value.
    fn adopt(&mut self, atoms: &[ParamAtom], cap: f64) -> bool {
        let mut active = Vec::with_capacity(atoms.len());
        let mut q = Vec::with_capacity(atoms.len());
        for pa in atoms {
            let (payload, w) = pa.to_payload(self.cone);
            if !(w > DROP_WEIGHT) || !w.is_finite() {
                continue;
            }
            let (a, _) = self.make_active(payload);
            active.push(a);
            q.push(w);
        }
        if q.iter().sum::<f64>() > cap {
            return false;
        }
        let v = self.obj.value(&combine(&self.zero, &active, &q));
        if v < self.value {
            self.active = active;
            self.q = q;
            self.value = v;
            self.prune();
            true
        } else {
            false
        }
    }

    fn refine(&mut self, opts: &EngineOptions, round: u64, smoothed: bool) {
        if self.active.is_empty() {
            return;
        }
        let start = self.param_atoms(restart_seed(opts.seed ^ 0x5EED, round));
        let (lm, _) = levenberg_marquardt(self.obj, self.cone, &start, 200);
        self.adopt(&lm, opts.cap);
        if self.cone.kind != ConeKind::Psd && self.active.len() > 1 && self.value > opts.target {
            // a mixture can sit in a local minimum that a single atom escapes
            let total: f64 = self.q.iter().sum();
            let mut order: Vec<usize> = (0..self.active.len()).collect();
            order.sort_by(|&a, &b| self.q[b].total_cmp(&self.q[a]));
            let picks: Vec<AtomPayload> =
                order.iter().take(3).map(|&k| self.active[k].payload.clone()).collect();
            for payload in &picks {
                let single = [ParamAtom::from_payload(payload, total, self.cone)];
                let (lm, _) = levenberg_marquardt(self.obj, self.cone, &single, 200);
                self.adopt(&lm, opts.cap);
                if self.value <= opts.target {
                    break;
                }
            }
        }
        if smoothed && self.value > opts.target {
            let mut atoms = self.param_atoms(restart_seed(opts.seed ^ 0xB5, round));
            let mut mu = self.obj.mu0();
            while mu > 1e-9 {
                atoms = lbfgs_smoothed(self.obj, self.cone, &atoms, mu, 150);
                mu *= 0.1;
            }
            self.adopt(&atoms, opts.cap);
        }
    }
}

fn refine_now(k: usize) -> bool {
    // iterations 4, 9, 19, 39, ...
    let n = k + 1;
    n >= 5 && n.is_multiple_of(5) && (n / 5).is_power_of_two()
}

pub(crate) fn run(obj: &dyn LinearObjective, cone: &ConeSpec, opts: &EngineOptions) -> EngineOutput {
    let n = cone.dims.total();
    let zero = obj.features(&Matrix::zeros(n, n));
    let value = obj.value(&zero);
    let mut st = State {
        obj,
        cone,
        zero,
        active: Vec::new(),
        q: Vec::new(),
        value,
        lipschitz: 1.0,
    };
    let cap = opts.cap;
    let mut history = vec![value];
    let mut stalled = 0;
    let mut iterations = 0;
    for k in 0..opts.max_iter {
        if st.value <= opts.target {
            break;
        }
        iterations = k + 1;
        let before = st.value;
        let mu = obj.mu0() / ((k + 1) as f64).sqrt();
        let (_, g) = obj.smoothed(&combine(&st.zero, &st.active, &st.q), mu);
        let grad = obj.adjoint(&g);
        let out = lmo_seeded(cone, &grad, restart_seed(opts.seed, k as u64));
        let (cand, _) = st.make_active(out.atom.payload);
        let idx = match st.find(&cand.unit) {
            Some(i) => i,
            None => {
                st.active.push(cand);
                st.q.push(0.0);
                st.active.len() - 1
            }
        };

        match opts.step_rule {
            StepRule::FullyCorrective => {
                let q0 = st.q.clone();
                let qa = st.reweight(&q0, mu, cap);
                st.try_accept(qa);
                let qb = st.least_squares_weights(cap);
                st.try_accept(qb);
                // a second pass at a finer smoothing level from the best point
                let q1 = st.q.clone();
                let qc = st.reweight(&q1, mu * 0.1, cap);
                st.try_accept(qc);
            }
            StepRule::LineSearch => {
                let base = st.q.clone();
                let vertex: Vec<f64> = (0..base.len())
                    .map(|i| if i == idx && out.value < 0.0 { cap } else { 0.0 })
                    .collect();
                let point = |g: f64| -> Vec<f64> {
                    base.iter().zip(&vertex).map(|(b, v)| (1.0 - g) * b + g * v).collect()
                };
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let phi = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..60 {
                    let a = hi - phi * (hi - lo);
                    let b = lo + phi * (hi - lo);
                    if st.eval(&point(a)) <= st.eval(&point(b)) {
                        hi = b;
                    } else {
                        lo = a;
                    }
                }
                st.try_accept(point(0.5 * (lo + hi)));
                st.try_accept(point(1.0));
            }
        }
        st.prune();

        if opts.refine && refine_now(k) && st.value > opts.target {
            st.refine(opts, k as u64, false);
        }

        history.push(st.value);
        if st.value < before * (1.0 - 1e-9) - 1e-15 {
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= PATIENCE {
                break;
            }
        }
    }
    if opts.refine && st.value > opts.target {
        st.refine(opts, u64::MAX, true);
        let last = *history.last().expect("history starts nonempty");
        if st.value < last {
            history.push(st.value);
        }
    }

    let atoms = st
        .active
        .iter()
        .zip(&st.q)
        .map(|(a, &w)| (a.payload.clone(), w))
        .collect();
    EngineOutput {
        atoms,
        history,
        iterations,
    }
}

