//! Small dense Levenberg-Marquardt solver for problems with at most a
//! handful of parameters.
//!
//! Steps solve `(JᵀJ + λ·diag(JᵀJ)) δ = -Jᵀr`. The damping factor is
//! multiplied by 10 on a rejected step and divided by 10 on an accepted one.
//! Iteration stops when an accepted step improves the SSE by less than
//! `rel_tol` relative, when the SSE reaches zero, when damping saturates
//! (no descent left at working precision), or after `max_iter` attempts.

pub(crate) trait Problem {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    /// Writes `model(x_i) - y_i`. Returns false when the parameters are
    /// outside the feasible region.
    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool;
    /// Row-major `n_residuals × n_params` Jacobian of the residuals.
    fn jacobian(&self, p: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub initial_lambda: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { max_iter: 200, rel_tol: 1e-10, initial_lambda: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub params: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const LAMBDA_CEILING: f64 = 1e16;

pub(crate) fn minimize<P: Problem>(problem: &P, start: &[f64], settings: Settings) -> Outcome {
    let n = problem.n_params();
    let m = problem.n_residuals();
    let mut params = start.to_vec();
    let mut resid = vec![0.0; m];
    if !problem.residuals(&params, &mut resid) || !resid.iter().all(|r| r.is_finite()) {
        return Outcome { params, iterations: 0, converged: false };
    }
    let mut sse = sum_sq(&resid);
    let mut lambda = settings.initial_lambda;
    let mut jac = vec![0.0; m * n];
    let mut trial = vec![0.0; n];
    let mut trial_resid = vec![0.0; m];
    let mut need_jacobian = true;
    let mut jtj = vec![0.0; n * n];
    let mut jtr = vec![0.0; n];

    for iter in 1..=settings.max_iter {
        if sse == 0.0 {
            return Outcome { params, iterations: iter - 1, converged: true };
        }
        if need_jacobian {
            problem.jacobian(&params, &mut jac);
            normal_equations(&jac, &resid, m, n, &mut jtj, &mut jtr);
            need_jacobian = false;
        }

        let mut a = jtj.clone();
        for i in 0..n {
            let d = jtj[i * n + i].max(f64::MIN_POSITIVE.sqrt());
            a[i * n + i] += lambda * d;
        }
        let mut rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
        let accepted = if solve_in_place(&mut a, &mut rhs, n) {
            for i in 0..n {
                trial[i] = params[i] + rhs[i];
            }
            let feasible = problem.residuals(&trial, &mut trial_resid);
            let trial_sse = sum_sq(&trial_resid);
            if feasible && trial_sse.is_finite() && trial_sse < sse {
                let improvement = (sse - trial_sse) / sse;
                params.copy_from_slice(&trial);
                std::mem::swap(&mut resid, &mut trial_resid);
                sse = trial_sse;
                lambda = (lambda / 10.0).max(1e-15);
                need_jacobian = true;
                if improvement < settings.rel_tol {
                    return Outcome { params, iterations: iter, converged: true };
                }
                true
            } else {
                false
            }
        } else {
            false
        };

        if !accepted {
            lambda *= 10.0;
            if lambda > LAMBDA_CEILING {
                return Outcome { params, iterations: iter, converged: true };
            }
        }
    }

    Outcome { params, iterations: settings.max_iter, converged: false }
}

pub(crate) fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}

fn normal_equations(jac: &[f64], resid: &[f64], m: usize, n: usize, jtj: &mut [f64], jtr: &mut [f64]) {
    jtj.iter_mut().for_each(|v| *v = 0.0);
    jtr.iter_mut().for_each(|v| *v = 0.0);
    for row in 0..m {
        let j = &jac[row * n..(row + 1) * n];
        for a in 0..n {
            jtr[a] += j[a] * resid[row];
            for b in 0..n {
                jtj[a * n + b] += j[a] * j[b];
            }
        }
    }
}

/// Gaussian elimination with partial pivoting; `b` receives the solution.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
        if a[pivot * n + col].abs() < 1e-300 || !a[pivot * n + col].is_finite() {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    b.iter().all(|v| v.is_finite())
}
