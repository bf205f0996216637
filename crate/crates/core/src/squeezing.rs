//! Spin squeezing `xi^2 = 4 min Var(J_perp) / N` in the frame of the mean spin.

use serde::Serialize;

use crate::dicke::CollectiveOperators;
use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

/// First moments `<J_a>` and symmetrized second moments `<(J_a J_b + J_b J_a) / 2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinMoments {
    pub n_spins: f64,
    pub first: [f64; 3],
    pub second: [[f64; 3]; 3],
}

/// Precomputed symmetrized products for repeated moment evaluation.
#[derive(Debug, Clone)]
pub struct OperatorProducts {
    /// Indexed by `(a, b)` with `a <= b`.
    pairs: Vec<((usize, usize), CMatrix)>,
}

impl SpinMoments {
    pub fn operator_products(ops: &CollectiveOperators) -> OperatorProducts {
        let j = [&ops.jx, &ops.jy, &ops.jz];
        let mut pairs = Vec::with_capacity(6);
        for a in 0..3 {
            for b in a..3 {
                let p = (j[a].dot(j[b]) + j[b].dot(j[a])).mapv(|z| z * 0.5);
                pairs.push(((a, b), p));
            }
        }
        OperatorProducts { pairs }
    }

    pub fn from_products(rho: &CMatrix, ops: &CollectiveOperators, products: &OperatorProducts) -> Self {
        let first = [&ops.jx, &ops.jy, &ops.jz].map(|o| linalg::expect(rho, o).re);
        let mut second = [[0.0; 3]; 3];
        for ((a, b), p) in &products.pairs {
            let v = linalg::expect(rho, p).re;
            second[*a][*b] = v;
            second[*b][*a] = v;
        }
        SpinMoments { n_spins: ops.n_spins as f64, first, second }
    }

    pub fn from_density(rho: &CMatrix, ops: &CollectiveOperators) -> Self {
        Self::from_products(rho, ops, &Self::operator_products(ops))
    }

    /// `<J.n>`.
    pub fn mean_along(&self, n: &[f64; 3]) -> f64 {
        dot(&self.first, n)
    }

    /// `<(J.u)(J.v) + (J.v)(J.u)> / 2`.
    pub fn second_along(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += u[a] * self.second[a][b] * v[b];
            }
        }
        s
    }

    /// Symmetrized covariance of `J.u` and `J.v`.
    pub fn covariance(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        self.second_along(u, v) - self.mean_along(u) * self.mean_along(v)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Relative mean-spin length below which the direction is undefined.
pub const DIRECTION_TOL: f64 = 1e-9;

/// Polar angles `(theta, phi)` of `<J>`, with `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`.
pub fn mean_spin_direction(first: &[f64; 3], n_spins: f64) -> Result<(f64, f64)> {
    let norm = dot(first, first).sqrt();
    if !(norm > DIRECTION_TOL * 0.5 * n_spins) {
        return Err(Error::DegenerateDirection { norm });
    }
    let theta = (first[2] / norm).clamp(-1.0, 1.0).acos();
    let phi = first[1].atan2(first[0]).rem_euclid(std::f64::consts::TAU);
    // a rounding-level negative angle maps to 2 pi
    let phi = if phi >= std::f64::consts::TAU { 0.0 } else { phi };
    Ok((theta, phi))
}

pub fn direction_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Orthonormal `(n1, n2)` spanning the plane perpendicular to `n0(theta, phi)`.
pub fn perpendicular_frame(theta: f64, phi: f64) -> ([f64; 3], [f64; 3]) {
    let n1 = [-phi.sin(), phi.cos(), 0.0];
    let n2 = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()];
    (n1, n2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingResult {
    pub xi2: f64,
    pub xi2_db: f64,
    pub theta: f64,
    pub phi: f64,
    /// Quadrature `cos(beta) n1 + sin(beta) n2` of minimal variance, in `[0, pi)`.
    pub beta_opt: f64,
}

pub fn to_db(xi2: f64) -> Result<f64> {
    if !(xi2 > 0.0) {
        return Err(Error::invalid("xi2", "decibels need a positive value"));
    }
    Ok(10.0 * xi2.log10())
}

pub(crate) fn db_or_neg_inf(xi2: f64) -> f64 {
    to_db(xi2).unwrap_or(f64::NEG_INFINITY)
}

/// Minimizes `Var(cos b J_n1 + sin b J_n2) = (A + B)/2 + (A - B)/2 cos 2b + C sin 2b`:
///
/// ```text
/// xi^2 = (2/N) [A + B - sqrt((A - B)^2 + 4 C^2)]
/// ```
///
/// The covariance `C` enters squared under the root.
pub fn squeezing_parameter(m: &SpinMoments) -> Result<SqueezingResult> {
    let (theta, phi) = mean_spin_direction(&m.first, m.n_spins)?;
    let (n1, n2) = perpendicular_frame(theta, phi);
    let a = m.covariance(&n1, &n1);
    let b = m.covariance(&n2, &n2);
    let cov = m.covariance(&n1, &n2);
    let xi2 = (2.0 / m.n_spins) * (a + b - ((a - b).powi(2) + 4.0 * cov * cov).sqrt());
    let beta_opt = (0.5 * ((2.0 * cov).atan2(a - b) + std::f64::consts::PI)).rem_euclid(std::f64::consts::PI);
    Ok(SqueezingResult { xi2, xi2_db: db_or_neg_inf(xi2), theta, phi, beta_opt })
}
