//! Steady states of the mean-field equations.
//!
//! Two routes are provided. [`steady_state_paper`] evaluates the closed-form
//! normal/broken-phase expressions exactly as published, including the
//! transverse denominator `1 + Gamma_b Z0^2 / 2h`. [`steady_state_oracle`] solves
//! the three stationarity conditions plus `|r| = 1` numerically.
//!
//! The two agree on `Z` when `gamma_dep = 0`, where the closed-form `Z0` is a
//! root of `Gamma_b^2 Z^2 / 4h^2 - lambda Z / h + 1 = 0`. They disagree on `X`,
//! `Y`: the self-consistent denominator is `1 + (Gamma_b Z0 / 2h)^2`. With
//! dephasing the four conditions have no common root off the poles (the norm
//! decays at rate `gamma_dep (X^2 + Y^2)`), so the oracle returns least-squares
//! minimizers and flags them inconsistent.

use serde::{Deserialize, Serialize};

use super::roots::{least_squares, LeastSquaresOptions};
use super::{critical_coupling, steady_residuals, BlochVector, MeanFieldParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Normal,
    BrokenPlus,
    BrokenMinus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Normal => "normal",
            Branch::BrokenPlus => "broken-plus",
            Branch::BrokenMinus => "broken-minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Published closed form.
    #[default]
    Paper,
    /// Numerical root of the stationarity conditions.
    Oracle,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Paper => "paper",
            SolveMode::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(SolveMode::Paper),
            "oracle" => Ok(SolveMode::Oracle),
            other => Err(Error::invalid("mode", format!("`{other}` is not paper|oracle"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateResult {
    pub branch: Branch,
    pub bloch: BlochVector,
    /// Closed-form `Z0` (1 on the normal branch; unused by the oracle beyond reporting `Z + r0`).
    pub z0: f64,
    pub r0: f64,
    /// Residuals of the three equations of motion and of `|r|^2 = 1`.
    pub residual: [f64; 4],
    pub mode: SolveMode,
}

impl SteadyStateResult {
    pub fn residual_norm(&self) -> f64 {
        self.residual.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// All four conditions hold to [`ORACLE_CONSISTENCY_TOL`].
    pub fn is_consistent(&self) -> bool {
        self.residual_norm() < ORACLE_CONSISTENCY_TOL
    }
}

/// Residual norm below which a steady state counts as an exact root.
pub const ORACLE_CONSISTENCY_TOL: f64 = 1e-10;

fn normal(p: &MeanFieldParams, mode: SolveMode) -> SteadyStateResult {
    SteadyStateResult {
        branch: Branch::Normal,
        bloch: BlochVector::NORTH,
        z0: 1.0,
        r0: p.r0(),
        residual: steady_residuals(&BlochVector::NORTH, p),
        mode,
    }
}

/// Closed-form steady state(s): the normal phase for `lambda <= lambda_c`,
/// otherwise both broken-phase sign branches.
pub fn steady_state_paper(p: &MeanFieldParams) -> Result<Vec<SteadyStateResult>> {
    let MeanFieldParams { h, lambda, gamma_b, .. } = *p;
    let lambda_c = critical_coupling(h, gamma_b)?;
    if lambda <= lambda_c {
        return Ok(vec![normal(p, SolveMode::Paper)]);
    }
    if !(gamma_b > 0.0) {
        return Err(Error::invalid("gamma_b", "the broken-phase closed form needs Gamma_b > 0"));
    }
    let r0 = p.r0();
    let disc = lambda * lambda - gamma_b * gamma_b * (1.0 + r0 * lambda / h);
    if disc < 0.0 {
        return Err(Error::NoBrokenSolution(format!("negative discriminant {disc:e}")));
    }
    let z0 = (2.0 * h / (gamma_b * gamma_b)) * (lambda - disc.sqrt());
    let z = z0 - r0;
    let transverse = (1.0 - z * z) / (1.0 + gamma_b * z0 * z0 / (2.0 * h));
    if !(transverse >= 0.0) {
        return Err(Error::NoBrokenSolution(format!("Z = {z} lies outside [-1, 1]")));
    }
    let x = transverse.sqrt();
    let y = gamma_b / (2.0 * h) * z0 * x;
    Ok([(Branch::BrokenPlus, 1.0), (Branch::BrokenMinus, -1.0)]
        .into_iter()
        .map(|(branch, sign)| {
            let bloch = BlochVector::new(sign * x, sign * y, z);
            SteadyStateResult { branch, bloch, z0, r0, residual: steady_residuals(&bloch, p), mode: SolveMode::Paper }
        })
        .collect())
}

const POLE_TOL: f64 = 1e-7;
const DEDUP_TOL: f64 = 1e-6;

/// Numerical steady states from a fixed set of eight starting points.
///
/// Returns the normal (north-pole) solution and any broken-phase solutions,
/// de-duplicated. Without dephasing only exact roots are kept; with dephasing
/// every converged least-squares minimizer off the poles is returned with its
/// residual. The south pole, an unstable fixed point under pumping, is dropped.
pub fn steady_state_oracle(p: &MeanFieldParams) -> Result<Vec<SteadyStateResult>> {
    let opts = LeastSquaresOptions::default();
    let mut seeds: Vec<BlochVector> = vec![
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
    ];
    match steady_state_paper(p) {
        Ok(v) if v.len() == 2 => seeds.extend(v.iter().map(|s| s.bloch)),
        _ => {
            seeds.push(BlochVector::new(0.6, 0.1, 0.79));
            seeds.push(BlochVector::new(-0.6, -0.1, 0.79));
        }
    }

    let f = |v: &[f64; 3]| steady_residuals(&BlochVector::from_array(*v), p);
    let mut found: Vec<SteadyStateResult> = Vec::new();
    let mut best = f64::INFINITY;
    for seed in &seeds {
        let out = least_squares(f, seed.to_array(), &opts);
        best = best.min(out.residual_norm);
        if !out.converged || !out.residual_norm.is_finite() {
            continue;
        }
        let mut bloch = BlochVector::from_array(out.x);
        let mut residual = out.residual;
        let branch = if bloch.x.hypot(bloch.y) < POLE_TOL {
            if bloch.z < 0.0 {
                continue;
            }
            bloch = BlochVector::NORTH;
            residual = steady_residuals(&bloch, p);
            Branch::Normal
        } else if bloch.x > 0.0 || (bloch.x == 0.0 && bloch.y > 0.0) {
            Branch::BrokenPlus
        } else {
            Branch::BrokenMinus
        };
        let candidate =
            SteadyStateResult { branch, bloch, z0: bloch.z + p.r0(), r0: p.r0(), residual, mode: SolveMode::Oracle };
        if p.gamma_dep == 0.0 && !candidate.is_consistent() {
            continue;
        }
        match found.iter_mut().find(|s| s.bloch.distance(&bloch) < DEDUP_TOL) {
            Some(existing) if existing.residual_norm() > candidate.residual_norm() => *existing = candidate,
            Some(_) => {}
            None => found.push(candidate),
        }
    }
    if found.is_empty() {
        return Err(Error::NoConvergence { starts: seeds.len(), best });
    }
    found.sort_by_key(|s| match s.branch {
        Branch::Normal => 0,
        Branch::BrokenPlus => 1,
        Branch::BrokenMinus => 2,
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn paper_normal_below_critical() {
        let p = MeanFieldParams::new(1.0, 0.5 * 1.0625, 0.5, 0.3);
        let s = steady_state_paper(&p).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].branch, Branch::Normal);
        assert_eq!(s[0].bloch, BlochVector::NORTH);
        assert_eq!(s[0].residual_norm(), 0.0);
    }

    #[test]
    fn paper_broken_point_with_dephasing() {
        // r0 = 1, lambda = 10
        let p = MeanFieldParams::new(1.0, 10.0, 0.5, 1.0);
        let s = steady_state_paper(&p).unwrap();
        let plus = s.iter().find(|s| s.branch == Branch::BrokenPlus).unwrap();
        let z0 = 8.0 * (10.0 - 97.25f64.sqrt());
        assert_relative_eq!(plus.z0, z0, max_relative = 1e-14);
        assert_relative_eq!(plus.z0, 1.1077, epsilon = 1e-4);
        assert_relative_eq!(plus.bloch.x, 0.870, epsilon = 1e-3);
        assert_relative_eq!(plus.bloch.y, 0.241, epsilon = 1e-3);
        assert_relative_eq!(plus.bloch.z, 0.107, epsilon = 1e-3);
        let minus = s.iter().find(|s| s.branch == Branch::BrokenMinus).unwrap();
        assert_eq!(minus.bloch.x, -plus.bloch.x);
        assert_eq!(minus.bloch.z, plus.bloch.z);
    }

    #[test]
    fn paper_branches_join_at_critical_point() {
        let p = MeanFieldParams::new(1.0, 1.0625, 0.5, 0.0);
        let s = steady_state_paper(&p).unwrap();
        assert_eq!(s[0].branch, Branch::Normal);
        let p = MeanFieldParams::new(1.0, 1.0625 * (1.0 + 1e-6), 0.5, 0.0);
        let s = steady_state_paper(&p).unwrap();
        // transverse components open as the square root of the distance to lambda_c
        assert!(s[0].bloch.distance(&BlochVector::NORTH) < 1e-2);
        assert_relative_eq!(s[0].z0, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn paper_no_broken_solution_just_above_critical_with_dephasing() {
        // Z0 - r0 slightly exceeds one right above lambda_c when gamma_dep > 0.
        let p = MeanFieldParams::new(1.0, 1.02, 0.2, 0.2);
        assert!(matches!(steady_state_paper(&p), Err(Error::NoBrokenSolution(_))));
    }

    #[test]
    fn oracle_reproduces_hand_solution() {
        let p = MeanFieldParams::new(1.0, 2.0, 0.5, 0.0);
        let s = steady_state_oracle(&p).unwrap();
        assert_eq!(s[0].branch, Branch::Normal);
        assert_eq!(s[0].residual_norm(), 0.0);
        let plus = s.iter().find(|s| s.branch == Branch::BrokenPlus).unwrap();
        // Z from 0.0625 Z^2 - 2 Z + 1 = 0; X, Y from Y = Gamma Z X / 2h and |r| = 1
        let z = (2.0 - 3.75f64.sqrt()) / 0.125;
        let x = ((1.0 - z * z) / (1.0 + (0.25 * z).powi(2))).sqrt();
        assert_relative_eq!(plus.bloch.z, z, epsilon = 1e-10);
        assert_relative_eq!(plus.bloch.x, x, epsilon = 1e-10);
        assert_relative_eq!(plus.bloch.y, 0.25 * z * x, epsilon = 1e-10);
        assert_relative_eq!(plus.bloch.z, 0.50807, epsilon = 1e-5);
        assert_relative_eq!(plus.bloch.x, 0.85445, epsilon = 1e-5);
        assert_relative_eq!(plus.bloch.y, 0.10853, epsilon = 1e-5);
        assert!(plus.is_consistent());
        assert!(s.iter().any(|s| s.branch == Branch::BrokenMinus));
    }

    #[test]
    fn oracle_and_paper_share_z_without_dephasing() {
        for lambda in [1.1, 1.5, 2.0, 4.0, 9.0] {
            let p = MeanFieldParams::new(1.0, lambda, 0.5, 0.0);
            let paper = steady_state_paper(&p).unwrap()[0];
            let oracle = steady_state_oracle(&p).unwrap();
            let plus = oracle.iter().find(|s| s.branch == Branch::BrokenPlus).unwrap();
            assert!((paper.bloch.z - plus.bloch.z).abs() < 1e-9, "lambda {lambda}");
        }
    }

    #[test]
    fn oracle_flags_inconsistency_with_dephasing() {
        let p = MeanFieldParams::new(1.0, 3.0, 0.5, 0.4);
        let s = steady_state_oracle(&p).unwrap();
        assert_eq!(s[0].branch, Branch::Normal);
        assert!(s[0].is_consistent());
        let broken: Vec<_> = s.iter().filter(|s| s.branch != Branch::Normal).collect();
        assert!(!broken.is_empty());
        assert!(broken.iter().all(|s| !s.is_consistent() && s.residual_norm() > 1e-6));
    }
}
