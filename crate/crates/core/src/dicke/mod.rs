//! Exact finite-`N` dynamics in the symmetric Dicke sector `|j, m>`, `j = N/2`.
//!
//! Basis index `k = 0..=N` holds `m = j - k`, so index 0 is the fully
//! polarized state `|j, j>`.

mod lindblad;

pub use lindblad::{
    evolve_master_with, lindblad_rhs, DensityMatrix, EvolveOptions, LindbladChannel, Liouvillian, RunSummary,
    SampleInfo, ABORT_POSITIVITY, POSITIVITY_TOL, RK4_STABILITY, STATE_TOL,
};

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::csv::{num, CsvTable};
use crate::linalg::{self, c, CMatrix, I};
use crate::lmgmap::{ChannelParams, LmgParams, LmgVariant};
use crate::squeezing::SpinMoments;
use crate::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOperators {
    pub n_spins: usize,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub jp: CMatrix,
    pub jm: CMatrix,
}

impl CollectiveOperators {
    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    pub fn j(&self) -> f64 {
        0.5 * self.n_spins as f64
    }

    /// `m` of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        self.j() - k as f64
    }

    fn check(&self, n_spins: f64) -> Result<()> {
        if (self.n_spins as f64 - n_spins).abs() > 0.0 {
            return Err(Error::DimensionMismatch { expected: self.n_spins, got: n_spins as usize });
        }
        Ok(())
    }
}

pub fn build_operators(n_spins: usize) -> Result<CollectiveOperators> {
    build_operators_capped(n_spins, DEFAULT_DIMENSION_CAP)
}

pub fn build_operators_capped(n_spins: usize, cap: usize) -> Result<CollectiveOperators> {
    if n_spins == 0 {
        return Err(Error::invalid("n_spins", "need at least one spin"));
    }
    if n_spins > cap {
        return Err(Error::DimensionCap { requested: n_spins, cap });
    }
    let d = n_spins + 1;
    let j = 0.5 * n_spins as f64;
    let m = |k: usize| j - k as f64;
    let jz = Array2::from_shape_fn((d, d), |(r, s)| if r == s { c(m(r)) } else { c(0.0) });
    // <j, m+1| J+ |j, m> sits at (k - 1, k)
    let jp = Array2::from_shape_fn((d, d), |(r, s)| {
        if s == r + 1 {
            let ms = m(s);
            c((j * (j + 1.0) - ms * (ms + 1.0)).max(0.0).sqrt())
        } else {
            c(0.0)
        }
    });
    let jm = linalg::dagger(&jp);
    let jx = (&jp + &jm).mapv(|z| z * 0.5);
    let jy = (&jp - &jm).mapv(|z| z * -0.5 * I);
    Ok(CollectiveOperators { n_spins, jx, jy, jz, jp, jm })
}

fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) + b.dot(a)
}

/// `-2h Jz - (2 lambda / N)(Jx^2 + chi Jy^2 + c {Jx, Jy})` with `c = xy_twist`.
pub fn build_lmg_hamiltonian(ops: &CollectiveOperators, p: &LmgParams) -> Result<CMatrix> {
    ops.check(p.n_spins)?;
    let n = p.n_spins;
    let mut h = ops.jz.mapv(|z| z * (-2.0 * p.h));
    h.scaled_add(c(-2.0 * p.lambda / n), &ops.jx.dot(&ops.jx));
    h.scaled_add(c(-2.0 * p.lambda * p.chi / n), &ops.jy.dot(&ops.jy));
    if p.xy_twist != 0.0 {
        h.scaled_add(c(-2.0 * p.xy_twist / n), &anticommutator(&ops.jx, &ops.jy));
    }
    Ok(h)
}

/// `A = L_alpha J+ + L_beta J-` of one channel.
fn channel_operator(ops: &CollectiveOperators, ch: &ChannelParams) -> CMatrix {
    ops.jp.mapv(|z| z * ch.l_alpha) + ops.jm.mapv(|z| z * ch.l_beta)
}

/// `mu0 Jz - sum_i zeta_i / (N K_i) A_i A_i^dag`, before reduction to LMG form.
pub fn build_generic_hamiltonian(ops: &CollectiveOperators, channels: &[ChannelParams], mu0: f64) -> CMatrix {
    let n = ops.n_spins as f64;
    let mut h = ops.jz.mapv(|z| z * mu0);
    for ch in channels {
        let a = channel_operator(ops, ch);
        h.scaled_add(c(-ch.zeta / (n * ch.k_denominator)), &a.dot(&linalg::dagger(&a)));
    }
    h
}

/// Channel `i` decays through `A_i^dag` at rate `kappa_i / (N K_i)`; dephasing
/// is `Jz` at rate `gamma_dep`. Zero-rate channels are omitted.
pub fn build_dissipators(
    ops: &CollectiveOperators,
    channels: &[ChannelParams],
    gamma_dep: f64,
) -> Result<Vec<LindbladChannel>> {
    let n = ops.n_spins as f64;
    let mut out = Vec::new();
    for ch in channels {
        let rate = ch.kappa / (n * ch.k_denominator);
        if rate == 0.0 || ch.sigma_sq() == 0.0 {
            continue;
        }
        out.push(LindbladChannel::new(linalg::dagger(&channel_operator(ops, ch)), rate)?);
    }
    push_dephasing(&mut out, ops, gamma_dep)?;
    Ok(out)
}

fn push_dephasing(out: &mut Vec<LindbladChannel>, ops: &CollectiveOperators, gamma_dep: f64) -> Result<()> {
    if gamma_dep != 0.0 {
        out.push(LindbladChannel::new(ops.jz.clone(), gamma_dep)?);
    }
    Ok(())
}

/// Dissipators of a directly specified LMG model, in the reduced per-variant
/// form: `(Gamma_a / N) D[2 Jx]` for the one-axis variant and
/// `(Gamma_a / N) D[J-]` otherwise, plus `(Gamma_b / N) D[J+]` and
/// `gamma_dep D[Jz]`.
pub fn build_variant_dissipators(
    ops: &CollectiveOperators,
    p: &LmgParams,
    variant: LmgVariant,
) -> Result<Vec<LindbladChannel>> {
    ops.check(p.n_spins)?;
    let n = p.n_spins;
    let mut out = Vec::new();
    if p.gamma_a != 0.0 {
        let jump = match variant {
            LmgVariant::OneAxis => ops.jx.mapv(|z| z * 2.0),
            _ => ops.jm.clone(),
        };
        out.push(LindbladChannel::new(jump, p.gamma_a / n)?);
    }
    if p.gamma_b != 0.0 {
        out.push(LindbladChannel::new(ops.jp.clone(), p.gamma_b / n)?);
    }
    push_dephasing(&mut out, ops, p.gamma_dep)?;
    Ok(out)
}

/// `|theta, phi> = sum_m sqrt(C(2j, j+m)) cos^(j+m)(theta/2) sin^(j-m)(theta/2) e^(i(j-m)phi) |j, m>`,
/// with `<J>/j = (sin theta cos phi, sin theta sin phi, cos theta)`.
pub fn coherent_spin_amplitudes(n_spins: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let (cos, sin) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let mut ln_binom = 0.0; // ln C(N, k)
    (0..=n_spins)
        .map(|k| {
            if k > 0 {
                ln_binom += ((n_spins - k + 1) as f64 / k as f64).ln();
            }
            let mag = (0.5 * ln_binom).exp() * cos.powi((n_spins - k) as i32) * sin.powi(k as i32);
            Complex64::from_polar(mag, k as f64 * phi)
        })
        .collect()
}

pub fn coherent_spin_state(n_spins: usize, theta: f64, phi: f64) -> Result<DensityMatrix> {
    if n_spins == 0 {
        return Err(Error::invalid("n_spins", "need at least one spin"));
    }
    DensityMatrix::pure(&coherent_spin_amplitudes(n_spins, theta, phi))
}

/// One recorded point of a Dicke trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationSample {
    pub t: f64,
    pub moments: SpinMoments,
    pub trace_err: f64,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterTrajectory {
    pub samples: Vec<ExpectationSample>,
    pub final_state: DensityMatrix,
    pub dt: f64,
    pub steps: usize,
}

pub const DICKE_CSV_HEADER: [&str; 10] = ["t", "jx", "jy", "jz", "jx2", "jy2", "jz2", "cov_12", "trace_err", "min_eig"];

impl MasterTrajectory {
    pub fn last(&self) -> &ExpectationSample {
        self.samples.last().expect("trajectories hold at least two samples")
    }

    /// `cov_12` is the symmetrized moment `<(Jx Jy + Jy Jx) / 2>`.
    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&DICKE_CSV_HEADER);
        for s in &self.samples {
            let m = &s.moments;
            t.push_row(&[
                num(s.t),
                num(m.first[0]),
                num(m.first[1]),
                num(m.first[2]),
                num(m.second[0][0]),
                num(m.second[1][1]),
                num(m.second[2][2]),
                num(m.second[0][1]),
                num(s.trace_err),
                num(s.min_eig),
            ]);
        }
        t.render()
    }
}

/// Integrates the master equation and records spin moments at each sample.
pub fn evolve_master(
    ops: &CollectiveOperators,
    rho0: &DensityMatrix,
    h: &CMatrix,
    channels: &[LindbladChannel],
    opts: &EvolveOptions,
) -> Result<MasterTrajectory> {
    let products = SpinMoments::operator_products(ops);
    let mut samples = Vec::with_capacity(opts.samples + 1);
    let run = evolve_master_with(rho0, h, channels, opts, |info, rho| {
        samples.push(ExpectationSample {
            t: info.t,
            moments: SpinMoments::from_products(rho, ops, &products),
            trace_err: info.trace_err,
            min_eig: info.min_eig,
        });
        Ok(())
    })?;
    Ok(MasterTrajectory { samples, final_state: run.final_state, dt: run.dt, steps: run.steps })
}
