//! Mean-field dynamics of the one-axis LMG model with collective pumping
//! `Gamma_b D[J+]` and dephasing `gamma_dep D[Jz]`.
//!
//! In the thermodynamic limit `<Jk Jl> -> <Jk><Jl>` and the scaled Bloch
//! vector `(X, Y, Z) = <J>/j`, `j = N/2`, obeys
//!
//! ```text
//! dX/dt =  2h Y - Gamma_b Z X - gamma_dep X / 2
//! dY/dt = -2h X + 2 lambda Z X - Gamma_b Z Y - gamma_dep Y / 2
//! dZ/dt = -2 lambda X Y + Gamma_b (X^2 + Y^2)
//! ```
//!
//! These conserve `|r|^2` except for the dephasing term:
//! `d|r|^2/dt = -gamma_dep (X^2 + Y^2)`.

mod roots;
mod steady;
mod sweep;

pub use roots::{least_squares, LeastSquaresOptions, LeastSquaresOutcome};
pub use steady::{
    steady_state_oracle, steady_state_paper, Branch, SolveMode, SteadyStateResult, ORACLE_CONSISTENCY_TOL,
};
pub use sweep::{
    sweep_csv, sweep_phase_diagram, sweep_phase_diagram_with, transition_jumps, GridAxis, PhaseSweepPoint, SecondAxis,
    SweepBranch, SweepRecord, SweepSpec, TransitionJump, SWEEP_CSV_HEADER,
};

use serde::{Deserialize, Serialize};

use crate::lmgmap::LmgParams;
use crate::ode::{rk4_step, step_count};
use crate::{Error, Result};

/// Scaled collective spin `<J>/j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const NORTH: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector { x: a[0], y: a[1], z: a[2] }
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// Parameters of the mean-field equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    pub h: f64,
    pub lambda: f64,
    pub gamma_b: f64,
    pub gamma_dep: f64,
}

impl MeanFieldParams {
    pub const fn new(h: f64, lambda: f64, gamma_b: f64, gamma_dep: f64) -> Self {
        MeanFieldParams { h, lambda, gamma_b, gamma_dep }
    }

    /// `r0 = gamma_dep / (2 Gamma_b)`.
    pub fn r0(&self) -> f64 {
        if self.gamma_dep == 0.0 {
            0.0
        } else {
            self.gamma_dep / (2.0 * self.gamma_b)
        }
    }
}

impl From<&LmgParams> for MeanFieldParams {
    fn from(p: &LmgParams) -> Self {
        MeanFieldParams { h: p.h, lambda: p.lambda, gamma_b: p.gamma_b, gamma_dep: p.gamma_dep }
    }
}

pub fn bloch_rhs(s: &BlochVector, p: &MeanFieldParams) -> BlochVector {
    let BlochVector { x, y, z } = *s;
    let MeanFieldParams { h, lambda, gamma_b, gamma_dep } = *p;
    BlochVector {
        x: 2.0 * h * y - gamma_b * z * x - 0.5 * gamma_dep * x,
        y: -2.0 * h * x + 2.0 * lambda * z * x - gamma_b * z * y - 0.5 * gamma_dep * y,
        z: -2.0 * lambda * x * y + gamma_b * (x * x + y * y),
    }
}

/// Largest growth of `|r|^2` tolerated in one step of a dephasing-free run.
pub const NORM_GROWTH_TOL: f64 = 1e-9;
const MAX_HALVINGS: u32 = 12;

/// Integration stopped on a non-finite state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAbort {
    pub t: f64,
    pub last_good: BlochVector,
}

impl From<BlochAbort> for Error {
    fn from(a: BlochAbort) -> Self {
        Error::Divergence { t: a.t }
    }
}

/// RK4 integration on a uniform grid with step `<= dt_max`; returns `(t, state)`
/// samples including `t = 0`.
///
/// Without dephasing the norm is conserved, and a step that grows `|r|^2` by
/// more than [`NORM_GROWTH_TOL`] is redone as two half steps.
pub fn integrate_bloch(
    s0: BlochVector,
    p: &MeanFieldParams,
    t_end: f64,
    dt_max: f64,
) -> std::result::Result<Vec<(f64, BlochVector)>, BlochAbort> {
    assert!(t_end > 0.0 && dt_max > 0.0, "t_end and dt_max must be positive");
    let n = step_count(t_end, dt_max);
    let dt = t_end / n as f64;
    let f = |y: &[f64; 3]| bloch_rhs(&BlochVector::from_array(*y), p).to_array();

    let mut out = Vec::with_capacity(n + 1);
    let mut y = s0.to_array();
    out.push((0.0, s0));
    for k in 1..=n {
        let next = if p.gamma_dep == 0.0 { guarded_step(&y, dt, &f, 0) } else { rk4_step(&y, dt, f) };
        let t = k as f64 * dt;
        if !next.iter().all(|v| v.is_finite()) {
            return Err(BlochAbort { t, last_good: BlochVector::from_array(y) });
        }
        y = next;
        out.push((t, BlochVector::from_array(y)));
    }
    Ok(out)
}

fn guarded_step(y: &[f64; 3], dt: f64, f: &impl Fn(&[f64; 3]) -> [f64; 3], depth: u32) -> [f64; 3] {
    let next = rk4_step(y, dt, f);
    let r2 = |v: &[f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if r2(&next) - r2(y) <= NORM_GROWTH_TOL || depth >= MAX_HALVINGS || !next[0].is_finite() {
        return next;
    }
    let mid = guarded_step(y, 0.5 * dt, f, depth + 1);
    guarded_step(&mid, 0.5 * dt, f, depth + 1)
}

/// `lambda_c = h + Gamma_b^2 / (4h)`; no dependence on dephasing.
pub fn critical_coupling(h: f64, gamma_b: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::invalid("h", "critical coupling needs h > 0"));
    }
    Ok(h + gamma_b * gamma_b / (4.0 * h))
}

/// The four steady-state conditions (three equations of motion plus the unit
/// norm constraint) evaluated at `s`.
pub fn steady_residuals(s: &BlochVector, p: &MeanFieldParams) -> [f64; 4] {
    let d = bloch_rhs(s, p);
    [d.x, d.y, d.z, s.norm_sq() - 1.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn north_pole_is_fixed() {
        let p = MeanFieldParams::new(0.7, 3.0, 0.4, 0.9);
        assert_eq!(bloch_rhs(&BlochVector::NORTH, &p), BlochVector::default());
    }

    #[test]
    fn rhs_direct_substitution() {
        let d = bloch_rhs(&BlochVector::new(1.0, 0.0, 0.0), &MeanFieldParams::new(1.0, 1.0, 0.5, 0.2));
        assert_relative_eq!(d.x, -0.1, epsilon = 1e-15);
        assert_relative_eq!(d.y, -2.0, epsilon = 1e-15);
        assert_relative_eq!(d.z, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn critical_coupling_values() {
        assert_relative_eq!(critical_coupling(1.0, 0.2).unwrap(), 1.01, epsilon = 1e-12);
        assert_relative_eq!(critical_coupling(1.0, 0.8).unwrap(), 1.16, epsilon = 1e-12);
        assert_eq!(critical_coupling(1.0, 0.5).unwrap(), 1.0625);
        assert_eq!(critical_coupling(1.0, 0.0).unwrap(), 1.0);
        assert!(critical_coupling(0.0, 0.5).is_err());
        assert!(critical_coupling(-1.0, 0.5).is_err());
    }

    #[test]
    fn constant_trajectory_at_pole() {
        let traj = integrate_bloch(BlochVector::NORTH, &MeanFieldParams::new(1.0, 2.0, 0.5, 0.3), 5.0, 0.01).unwrap();
        assert!(traj.iter().all(|(_, s)| *s == BlochVector::NORTH));
        assert_eq!(traj.len(), 501);
    }

    #[test]
    fn norm_conserved_without_dephasing() {
        let p = MeanFieldParams::new(1.0, 2.0, 0.5, 0.0);
        let th: f64 = 1.1;
        let s0 = BlochVector::new(th.sin() * 0.3f64.cos(), th.sin() * 0.3f64.sin(), th.cos());
        let traj = integrate_bloch(s0, &p, 50.0, 0.005).unwrap();
        for (_, s) in &traj {
            assert!((s.norm_sq().sqrt() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn divergence_reports_last_good_state() {
        // Negative dephasing makes the transverse components grow without bound.
        let p = MeanFieldParams::new(0.0, 0.0, 0.0, -1e3);
        let err = integrate_bloch(BlochVector::new(1.0, 1.0, 0.0), &p, 10.0, 0.1).unwrap_err();
        assert!(err.last_good.x.is_finite());
        assert!(err.t > 0.0);
    }
}
