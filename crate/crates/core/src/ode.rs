//! Classic fixed-step fourth-order Runge-Kutta.

use ndarray::Array2;
use num_complex::Complex64;

/// A state that supports the linear combinations RK4 needs.
pub trait OdeState: Clone {
    /// Returns `self + a * other`.
    fn axpy(&self, a: f64, other: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for [f64; 3] {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        [self[0] + a * o[0], self[1] + a * o[1], self[2] + a * o[2]]
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Array2<Complex64> {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        let mut out = self.clone();
        out.scaled_add(Complex64::new(a, 0.0), o);
        out
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// One RK4 step of size `dt` for the autonomous system `dy/dt = f(y)`.
pub fn rk4_step<S: OdeState>(y: &S, dt: f64, f: impl Fn(&S) -> S) -> S {
    let k1 = f(y);
    let k2 = f(&y.axpy(0.5 * dt, &k1));
    let k3 = f(&y.axpy(0.5 * dt, &k2));
    let k4 = f(&y.axpy(dt, &k3));
    y.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4)
}

/// Splits `[0, t_end]` into equal steps no longer than `dt_max`.
pub(crate) fn step_count(t_end: f64, dt_max: f64) -> usize {
    ((t_end / dt_max).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_fourth_order() {
        // x'' = -x as (x, v, 0)
        let f = |y: &[f64; 3]| [y[1], -y[0], 0.0];
        let err = |dt: f64| {
            let n = (1.0 / dt).round() as usize;
            let mut y = [1.0, 0.0, 0.0];
            for _ in 0..n {
                y = rk4_step(&y, dt, f);
            }
            (y[0] - 1f64.cos()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "convergence ratio {ratio}");
    }
}
