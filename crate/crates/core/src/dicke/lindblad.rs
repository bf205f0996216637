//! Dense-state Lindblad integration with sparse operators.
//!
//! ```text
//! d rho/dt = -i[H, rho] + sum_k rate_k (2 O rho O^dag - O^dag O rho - rho O^dag O)
//! ```
//!
//! Every operator in this crate is banded in its natural basis, so `H` and
//! the jump operators are stored as coordinate lists while `rho` stays dense.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{self, CMatrix, I};
use crate::ode::{rk4_step, step_count};
use crate::{Error, Result};

/// Hermiticity and trace tolerance for a valid density matrix.
pub const STATE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a valid density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Evolution aborts when the smallest eigenvalue drops below `-ABORT_POSITIVITY`.
pub const ABORT_POSITIVITY: f64 = 1e-6;
/// Largest `dt * ||L||` used by the integrator.
pub const RK4_STABILITY: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    pub jump: CMatrix,
    pub rate: f64,
}

impl LindbladChannel {
    pub fn new(jump: CMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::invalid("rate", "channel rates are finite and non-negative"));
        }
        if jump.nrows() != jump.ncols() {
            return Err(Error::DimensionMismatch { expected: jump.nrows(), got: jump.ncols() });
        }
        Ok(LindbladChannel { jump, rate })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), got: rho.ncols() });
        }
        let herm = linalg::hermiticity_error(&rho);
        if herm > STATE_TOL {
            return Err(Error::invalid("rho", format!("not Hermitian (error {herm:e})")));
        }
        let tr = linalg::trace(&rho);
        if (tr - 1.0).norm() > STATE_TOL {
            return Err(Error::invalid("rho", format!("trace {tr} is not 1")));
        }
        let min = linalg::min_eigenvalue(&rho);
        if min < -POSITIVITY_TOL {
            return Err(Error::invalid("rho", format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { rho })
    }

    /// `|psi><psi|` for a state vector, normalized here.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("psi", "zero state vector"));
        }
        let d = psi.len();
        let rho = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj() / (norm * norm));
        Ok(DensityMatrix { rho })
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { rho: linalg::identity(dim).mapv(|z| z / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn expect(&self, op: &CMatrix) -> Complex64 {
        linalg::expect(&self.rho, op)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.rho)
    }
}

/// Coordinate-list operator.
#[derive(Debug, Clone)]
struct Sparse {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Sparse {
    fn from_dense(a: &CMatrix) -> Self {
        let entries =
            a.indexed_iter().filter(|(_, z)| **z != Complex64::new(0.0, 0.0)).map(|((i, j), z)| (i, j, *z)).collect();
        Sparse { dim: a.nrows(), entries }
    }

    /// `out += scale * self * x` for row-major `x`, `out`.
    fn mul_add(&self, scale: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for &(i, k, v) in &self.entries {
            let a = scale * v;
            let src = &x[k * d..(k + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += a * s;
            }
        }
    }
}

fn conj_transpose(x: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = x[j * d + i].conj();
        }
    }
    out
}

/// The generator `L` of a Lindblad equation, ready for repeated application.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    /// `H - i sum rate O^dag O`.
    h_eff: Sparse,
    jumps: Vec<(Sparse, f64)>,
    norm_estimate: f64,
}

impl Liouvillian {
    pub fn new(h: &CMatrix, channels: &[LindbladChannel]) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: h.ncols() });
        }
        let mut h_eff = h.clone();
        let mut norm_estimate = 2.0 * linalg::norm_inf(h);
        let mut jumps = Vec::new();
        for ch in channels {
            if ch.jump.nrows() != dim || ch.jump.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: ch.jump.nrows() });
            }
            if ch.rate == 0.0 {
                continue;
            }
            let od = linalg::dagger(&ch.jump);
            h_eff.scaled_add(-I * ch.rate, &od.dot(&ch.jump));
            // ||O||_2^2 <= ||O||_1 ||O||_inf
            norm_estimate += 4.0 * ch.rate * linalg::norm_inf(&ch.jump) * linalg::norm_inf(&od);
            jumps.push((Sparse::from_dense(&ch.jump), ch.rate));
        }
        Ok(Liouvillian { dim, h_eff: Sparse::from_dense(&h_eff), jumps, norm_estimate })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper estimate of the generator's spectral radius.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Largest step within the RK4 stability region.
    pub fn stable_dt(&self) -> f64 {
        if self.norm_estimate > 0.0 {
            RK4_STABILITY / self.norm_estimate
        } else {
            f64::INFINITY
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim;
        assert_eq!(rho.dim(), (d, d), "state dimension");
        let zero = Complex64::new(0.0, 0.0);
        let rho = rho.as_standard_layout();
        let x = rho.as_slice().expect("standard layout");
        let xd = conj_transpose(x, d);

        // -i H_eff rho + (-i H_eff rho^dag)^dag
        let mut k = vec![zero; d * d];
        let mut kd = vec![zero; d * d];
        self.h_eff.mul_add(-I, x, &mut k);
        self.h_eff.mul_add(-I, &xd, &mut kd);
        let mut out = vec![zero; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = k[i * d + j] + kd[j * d + i].conj();
            }
        }

        let mut t = vec![zero; d * d];
        let mut s = vec![zero; d * d];
        for (op, rate) in &self.jumps {
            // O rho O^dag = O (O rho^dag)^dag
            t.fill(zero);
            op.mul_add(Complex64::new(1.0, 0.0), &xd, &mut t);
            let td = conj_transpose(&t, d);
            s.fill(zero);
            op.mul_add(Complex64::new(2.0 * rate, 0.0), &td, &mut s);
            for (o, v) in out.iter_mut().zip(&s) {
                *o += v;
            }
        }
        Array2::from_shape_vec((d, d), out).expect("square")
    }
}

/// `d rho/dt` for the given Hamiltonian and channels.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, channels: &[LindbladChannel]) -> Result<CMatrix> {
    let l = Liouvillian::new(h, channels)?;
    if rho.dim() != (l.dim, l.dim) {
        return Err(Error::DimensionMismatch { expected: l.dim, got: rho.nrows() });
    }
    Ok(l.apply(rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub t_end: f64,
    /// Requested step; reduced to the RK4 stability limit when larger.
    pub dt: f64,
    /// Number of sampling intervals (`samples + 1` records including `t = 0`).
    pub samples: usize,
}

impl EvolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("t_end", "must be positive"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample interval"));
        }
        Ok(())
    }
}

/// Diagnostics attached to every recorded sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleInfo {
    pub t: f64,
    /// Largest `|tr rho - 1|` before renormalization since the previous sample.
    pub trace_err: f64,
    pub min_eig: f64,
}

/// Summary of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub final_state: DensityMatrix,
    pub dt: f64,
    pub steps: usize,
}

/// Fixed-step RK4 from `rho0` to `opts.t_end`, calling `on_sample` at
/// evenly spaced steps (always including both end points).
///
/// After each step the trace is renormalized and `rho` re-symmetrized. The
/// run aborts on a non-finite state, on a minimum eigenvalue below
/// `-ABORT_POSITIVITY`, or when `on_sample` returns an error.
pub fn evolve_master_with(
    rho0: &DensityMatrix,
    h: &CMatrix,
    channels: &[LindbladChannel],
    opts: &EvolveOptions,
    mut on_sample: impl FnMut(SampleInfo, &CMatrix) -> Result<()>,
) -> Result<RunSummary> {
    opts.validate()?;
    let l = Liouvillian::new(h, channels)?;
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: rho0.dim() });
    }
    let steps = step_count(opts.t_end, opts.dt.min(l.stable_dt()));
    let dt = opts.t_end / steps as f64;
    let every = (steps / opts.samples).max(1);

    let mut rho = rho0.matrix().clone();
    on_sample(
        SampleInfo { t: 0.0, trace_err: (linalg::trace(&rho) - 1.0).norm(), min_eig: linalg::min_eigenvalue(&rho) },
        &rho,
    )?;
    let mut trace_err: f64 = 0.0;
    for k in 1..=steps {
        let next = rk4_step(&rho, dt, |r| l.apply(r));
        let t = k as f64 * dt;
        let tr = linalg::trace(&next);
        if !(tr.re.is_finite() && tr.im.is_finite()) || !crate::ode::OdeState::is_finite(&next) {
            return Err(Error::Divergence { t });
        }
        trace_err = trace_err.max((tr - 1.0).norm());
        let herm = (&next + &linalg::dagger(&next)).mapv(|z| z * 0.5 / tr.re);
        rho = herm;
        if k % every == 0 || k == steps {
            let min_eig = linalg::min_eigenvalue(&rho);
            if min_eig < -ABORT_POSITIVITY {
                return Err(Error::Positivity { t, min_eig });
            }
            on_sample(SampleInfo { t, trace_err, min_eig }, &rho)?;
            trace_err = 0.0;
        }
    }
    Ok(RunSummary { final_state: DensityMatrix { rho }, dt, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        Array2::from_shape_fn((d, d), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        let a = random_matrix(rng, d);
        (&a + &linalg::dagger(&a)).mapv(|z| z * 0.5)
    }

    fn random_state(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        let a = random_matrix(rng, d);
        let p = a.dot(&linalg::dagger(&a));
        let tr = linalg::trace(&p);
        p.mapv(|z| z / tr)
    }

    /// Literal dense evaluation of the master equation.
    fn reference_rhs(rho: &CMatrix, h: &CMatrix, channels: &[LindbladChannel]) -> CMatrix {
        let mut out = linalg::commutator(h, rho).mapv(|z| -I * z);
        for ch in channels {
            let o = &ch.jump;
            let od = linalg::dagger(o);
            let odo = od.dot(o);
            let term = o.dot(rho).dot(&od).mapv(|z| 2.0 * z) - odo.dot(rho) - rho.dot(&odo);
            out.scaled_add(c(ch.rate), &term);
        }
        out
    }

    #[test]
    fn sparse_rhs_matches_dense_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1, 2, 5, 9] {
            let h = random_hermitian(&mut rng, d);
            let chans = vec![
                LindbladChannel::new(random_matrix(&mut rng, d), 0.3).unwrap(),
                LindbladChannel::new(random_matrix(&mut rng, d), 1.7).unwrap(),
            ];
            let rho = random_matrix(&mut rng, d);
            let got = lindblad_rhs(&rho, &h, &chans).unwrap();
            assert!(linalg::norm(&(&got - &reference_rhs(&rho, &h, &chans))) < 1e-12);
        }
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = rng.random_range(2..8);
            let h = random_hermitian(&mut rng, d);
            let chans = vec![LindbladChannel::new(random_matrix(&mut rng, d), rng.random_range(0.0..2.0)).unwrap()];
            let rho = random_hermitian(&mut rng, d);
            let r = lindblad_rhs(&rho, &h, &chans).unwrap();
            assert!(linalg::trace(&r).norm() < 1e-12);
            assert!(linalg::hermiticity_error(&r) < 1e-12);
        }
    }

    #[test]
    fn diagonal_everything_is_stationary() {
        let h = Array2::from_diag(&ndarray::arr1(&[c(1.0), c(-0.5), c(2.0)]));
        let rho = Array2::from_diag(&ndarray::arr1(&[c(0.2), c(0.3), c(0.5)]));
        let r = lindblad_rhs(&rho, &h, &[]).unwrap();
        assert_eq!(linalg::norm(&r), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(LindbladChannel::new(linalg::identity(2), -1.0).is_err());
        let h = linalg::identity(3);
        let ch = LindbladChannel::new(linalg::identity(2), 1.0).unwrap();
        assert!(matches!(Liouvillian::new(&h, &[ch]), Err(Error::DimensionMismatch { .. })));
        assert!(DensityMatrix::new(linalg::identity(2)).is_err());
        let neg = Array2::from_diag(&ndarray::arr1(&[c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(4).into_matrix()).is_ok());
    }

    #[test]
    fn evolution_preserves_state_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 6;
        let h = random_hermitian(&mut rng, d);
        let chans = vec![
            LindbladChannel::new(random_matrix(&mut rng, d), 0.2).unwrap(),
            LindbladChannel::new(random_hermitian(&mut rng, d), 0.1).unwrap(),
        ];
        let rho0 = DensityMatrix::new(random_state(&mut rng, d)).unwrap();
        let opts = EvolveOptions { t_end: 10.0, dt: 0.01, samples: 50 };
        let mut count = 0;
        let run = evolve_master_with(&rho0, &h, &chans, &opts, |info, rho| {
            count += 1;
            assert!(info.trace_err < 1e-10);
            assert!(info.min_eig > -1e-8);
            assert!(linalg::hermiticity_error(rho) < 1e-10);
            assert!((linalg::trace(rho) - 1.0).norm() < 1e-10);
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 51);
        assert!(DensityMatrix::new(run.final_state.into_matrix()).is_ok());
    }

    #[test]
    fn step_respects_stability_limit() {
        let h = Array2::from_diag(&ndarray::arr1(&[c(200.0), c(-200.0)]));
        let rho0 = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        let opts = EvolveOptions { t_end: 1.0, dt: 0.5, samples: 1 };
        let run = evolve_master_with(&rho0, &h, &[], &opts, |_, _| Ok(())).unwrap();
        // commutator eigenvalues span 2 ||H|| = 400
        assert!(run.dt <= RK4_STABILITY / 400.0 + 1e-15);
        // bounded, though heavily damped at the stability edge
        let coh = run.final_state.matrix()[[0, 1]];
        assert!(coh.norm() <= 0.5 + 1e-12);
    }

    #[test]
    fn callback_error_aborts() {
        let rho0 = DensityMatrix::maximally_mixed(2);
        let opts = EvolveOptions { t_end: 1.0, dt: 0.1, samples: 10 };
        let err = evolve_master_with(&rho0, &linalg::identity(2), &[], &opts, |info, _| {
            if info.t > 0.45 {
                Err(Error::Truncation { t: info.t, top: 1.0, n_max: 1 })
            } else {
                Ok(())
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }
}
