//! Damped Gauss-Newton (Levenberg-Marquardt) for small overdetermined systems
//! `r: R^3 -> R^4`, with a central-difference Jacobian.

use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquaresOptions {
    /// Stop once `|r| <= residual_tol`.
    pub residual_tol: f64,
    /// Stop once the gradient `J^T r` falls below this (a least-squares minimum).
    pub gradient_tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for LeastSquaresOptions {
    fn default() -> Self {
        LeastSquaresOptions { residual_tol: 1e-12, gradient_tol: 1e-13, max_iter: 200, fd_step: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquaresOutcome {
    pub x: [f64; 3],
    pub residual: [f64; 4],
    pub residual_norm: f64,
    pub iterations: usize,
    /// Reached either tolerance before the iteration cap.
    pub converged: bool,
}

fn norm4(r: &[f64; 4]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jacobian(f: &impl Fn(&[f64; 3]) -> [f64; 4], x: &[f64; 3], step: f64) -> [[f64; 3]; 4] {
    let mut jac = [[0.0; 3]; 4];
    for k in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[k] += step;
        xm[k] -= step;
        let (rp, rm) = (f(&xp), f(&xm));
        for i in 0..4 {
            jac[i][k] = (rp[i] - rm[i]) / (2.0 * step);
        }
    }
    jac
}

/// Minimizes `|f(x)|^2` from `x0`.
pub fn least_squares(
    f: impl Fn(&[f64; 3]) -> [f64; 4],
    x0: [f64; 3],
    opts: &LeastSquaresOptions,
) -> LeastSquaresOutcome {
    let mut x = x0;
    let mut r = f(&x);
    let mut cost = norm4(&r);
    let mut mu: f64 = 1e-3;
    let mut converged = cost <= opts.residual_tol;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let jac = jacobian(&f, &x, opts.fd_step);
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for i in 0..4 {
            for a in 0..3 {
                jtr[a] += jac[i][a] * r[i];
                for b in 0..3 {
                    jtj[(a, b)] += jac[i][a] * jac[i][b];
                }
            }
        }
        if jtr.norm() <= opts.gradient_tol {
            converged = true;
            break;
        }

        let mut improved = false;
        for _ in 0..40 {
            let mut damped = jtj;
            for a in 0..3 {
                damped[(a, a)] += mu * (1.0 + jtj[(a, a)]);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                mu *= 10.0;
                continue;
            };
            let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let rt = f(&trial);
            let ct = norm4(&rt);
            if ct.is_finite() && ct < cost {
                let small_step = step.norm() <= 1e-15 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
                x = trial;
                r = rt;
                cost = ct;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                if cost <= opts.residual_tol || small_step {
                    converged = true;
                }
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            // No descent direction left at working precision: a stationary point.
            converged = true;
        }
    }

    LeastSquaresOutcome { x, residual: r, residual_norm: cost, iterations, converged }
}
