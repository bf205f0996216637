//! Holstein-Primakoff limit: a single boson `d` with
//!
//! ```text
//! H_T = -2h d^dag d - lambda (d^2 + d^dag^2)
//! d rho/dt = -i[H_T, rho] + Gamma_a D[d] + Gamma_b D[d^dag] + gamma_dep D[d^dag d]
//! ```
//!
//! For a quadratic Hamiltonian, linear jumps and number dephasing the moments
//! `n = <d^dag d>`, `m = <d^2>` obey the closed linear system
//!
//! ```text
//! dn/dt = 4 lambda Im m - 2 Gamma_a n + 2 Gamma_b (n + 1)
//! dm/dt = 4i h m + i lambda (4n + 2) - 2 (Gamma_a - Gamma_b) m - 4 gamma_dep m
//! ```
//!
//! and, from a state with `<d> = 0`, `xi^2 = 1 + 2n - 2|m|`.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;
use std::str::FromStr;

use crate::csv::{num, CsvTable};
use crate::dicke::{evolve_master_with, DensityMatrix, EvolveOptions, LindbladChannel};
use crate::linalg::{self, c, CMatrix, I};
use crate::ode::{rk4_step, step_count, OdeState};
use crate::par::{self, Exec};
use crate::squeezing::{db_or_neg_inf, SqueezingResult};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct HpParams {
    pub h: f64,
    pub lambda: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_dep: f64,
}

impl HpParams {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [(self.h, "h"), (self.lambda, "lambda")] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (v, name) in [(self.gamma_a, "gamma_a"), (self.gamma_b, "gamma_b"), (self.gamma_dep, "gamma_dep")] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "rates are finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMoments {
    pub n: f64,
    pub m: Complex64,
    /// `<d>`.
    pub first: Complex64,
}

impl SecondMoments {
    pub const VACUUM: SecondMoments =
        SecondMoments { n: 0.0, m: Complex64::new(0.0, 0.0), first: Complex64::new(0.0, 0.0) };

    /// `(|m|^2 - n(n+1)) / (1 + n(n+1))`; positive values are unphysical.
    pub fn physicality_excess(&self) -> f64 {
        let bound = self.n * (self.n + 1.0);
        (self.m.norm_sqr() - bound) / (1.0 + bound)
    }

    /// `1 + 2n - 2|m|`.
    pub fn xi2(&self) -> f64 {
        1.0 + 2.0 * self.n - 2.0 * self.m.norm()
    }

    /// Variance of the conjugate quadrature, `1 + 2n + 2|m|`.
    pub fn antisqueezed(&self) -> f64 {
        1.0 + 2.0 * self.n + 2.0 * self.m.norm()
    }
}

impl OdeState for SecondMoments {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        SecondMoments { n: self.n + a * o.n, m: self.m + a * o.m, first: self.first + a * o.first }
    }
    fn is_finite(&self) -> bool {
        [self.n, self.m.re, self.m.im, self.first.re, self.first.im].iter().all(|v| v.is_finite())
    }
}

pub fn moment_rhs(s: &SecondMoments, p: &HpParams) -> SecondMoments {
    let HpParams { h, lambda, gamma_a, gamma_b, gamma_dep } = *p;
    SecondMoments {
        n: 4.0 * lambda * s.m.im - 2.0 * gamma_a * s.n + 2.0 * gamma_b * (s.n + 1.0),
        m: 4.0 * I * h * s.m
            + I * lambda * (4.0 * s.n + 2.0)
            + s.m * (-2.0 * gamma_a + 2.0 * gamma_b - 4.0 * gamma_dep),
        first: I * (2.0 * h * s.first + 2.0 * lambda * s.first.conj()) - (gamma_a - gamma_b + gamma_dep) * s.first,
    }
}

/// Relative physicality excess that aborts a moment run.
pub const PHYSICALITY_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpSample {
    pub t: f64,
    pub moments: SecondMoments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HpSolver {
    #[default]
    Moments,
    Fock,
}

impl HpSolver {
    pub fn name(self) -> &'static str {
        match self {
            HpSolver::Moments => "moments",
            HpSolver::Fock => "fock",
        }
    }
}

impl FromStr for HpSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moments" => Ok(HpSolver::Moments),
            "fock" => Ok(HpSolver::Fock),
            other => Err(Error::invalid("solver", format!("`{other}` is not moments or fock"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpTrajectory {
    pub solver: HpSolver,
    pub samples: Vec<HpSample>,
}

pub const HP_CSV_HEADER: [&str; 7] = ["t", "n", "re_m", "im_m", "xi2", "xi2_db", "solver"];

impl HpTrajectory {
    /// Smallest `xi^2` over samples with `0 < t <= t_max`.
    pub fn min_xi2(&self, t_max: f64) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .filter(|s| s.t > 0.0 && s.t <= t_max * (1.0 + 1e-12))
            .map(|s| (s.t, s.moments.xi2()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn last(&self) -> &HpSample {
        self.samples.last().expect("trajectories hold at least two samples")
    }

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&HP_CSV_HEADER);
        for s in &self.samples {
            let x = s.moments.xi2();
            t.push_row(&[
                num(s.t),
                num(s.moments.n),
                num(s.moments.m.re),
                num(s.moments.m.im),
                num(x),
                num(db_or_neg_inf(x)),
                self.solver.name().to_string(),
            ]);
        }
        t.render()
    }
}

fn sample_stride(steps: usize, samples: usize) -> usize {
    (steps / samples.max(1)).max(1)
}

/// RK4 on the closed moment system with step `<= opts.dt`.
pub fn evolve_moments(s0: &SecondMoments, p: &HpParams, opts: &EvolveOptions) -> Result<HpTrajectory> {
    p.validate()?;
    opts.validate()?;
    if s0.n < 0.0 || s0.physicality_excess() > PHYSICALITY_ABORT {
        return Err(Error::invalid("s0", "initial moments are unphysical"));
    }
    let steps = step_count(opts.t_end, opts.dt);
    let dt = opts.t_end / steps as f64;
    let every = sample_stride(steps, opts.samples);
    let mut s = *s0;
    let mut samples = vec![HpSample { t: 0.0, moments: s }];
    for k in 1..=steps {
        s = rk4_step(&s, dt, |y| moment_rhs(y, p));
        let t = k as f64 * dt;
        if !s.is_finite() {
            return Err(Error::Divergence { t });
        }
        let excess = s.physicality_excess();
        if excess > PHYSICALITY_ABORT {
            return Err(Error::Physicality { t, excess });
        }
        if k % every == 0 || k == steps {
            samples.push(HpSample { t, moments: s });
        }
    }
    Ok(HpTrajectory { solver: HpSolver::Moments, samples })
}

/// Occupation of the top Fock level that still counts as a healthy truncation.
pub const TRUNCATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    pub n_max: usize,
    pub rho: DensityMatrix,
}

impl FockDensityMatrix {
    pub fn vacuum(n_max: usize) -> Self {
        Self::number_state(n_max, 0)
    }

    pub fn number_state(n_max: usize, k: usize) -> Self {
        let mut amps = vec![c(0.0); n_max + 1];
        amps[k.min(n_max)] = c(1.0);
        Self::pure(n_max, &amps).expect("normalized basis state")
    }

    /// Pure state from Fock amplitudes `0..=n_max` (normalized here).
    pub fn pure(n_max: usize, amps: &[Complex64]) -> Result<Self> {
        if amps.len() != n_max + 1 {
            return Err(Error::DimensionMismatch { expected: n_max + 1, got: amps.len() });
        }
        Ok(FockDensityMatrix { n_max, rho: DensityMatrix::pure(amps)? })
    }

    pub fn top_occupation(&self) -> f64 {
        self.rho.matrix()[[self.n_max, self.n_max]].re
    }
}

/// `(d, d^dag d)` truncated to `0..=n_max`.
pub fn fock_operators(n_max: usize) -> (CMatrix, CMatrix) {
    let dim = n_max + 1;
    let d = Array2::from_shape_fn((dim, dim), |(r, s)| if s == r + 1 { c((s as f64).sqrt()) } else { c(0.0) });
    let num = Array2::from_shape_fn((dim, dim), |(r, s)| if r == s { c(r as f64) } else { c(0.0) });
    (d, num)
}

fn fock_moments(rho: &CMatrix, d: &CMatrix, d2: &CMatrix, num: &CMatrix) -> SecondMoments {
    SecondMoments { n: linalg::expect(rho, num).re, m: linalg::expect(rho, d2), first: linalg::expect(rho, d) }
}

/// Dense Lindblad integration in the truncated Fock space.
///
/// Aborts with [`Error::Truncation`] as soon as a sample shows the top level
/// occupied above [`TRUNCATION_TOL`].
pub fn evolve_fock(rho0: &FockDensityMatrix, p: &HpParams, opts: &EvolveOptions) -> Result<HpTrajectory> {
    p.validate()?;
    let n_max = rho0.n_max;
    if rho0.top_occupation() >= TRUNCATION_TOL {
        return Err(Error::Truncation { t: 0.0, top: rho0.top_occupation(), n_max });
    }
    let (d, num) = fock_operators(n_max);
    let dd = linalg::dagger(&d);
    let d2 = d.dot(&d);
    let mut ham = num.mapv(|z| z * (-2.0 * p.h));
    ham.scaled_add(c(-p.lambda), &(&d2 + &dd.dot(&dd)));
    let mut channels = Vec::new();
    for (op, rate) in [(&d, p.gamma_a), (&dd, p.gamma_b), (&num, p.gamma_dep)] {
        if rate > 0.0 {
            channels.push(LindbladChannel::new(op.clone(), rate)?);
        }
    }
    let mut samples = Vec::with_capacity(opts.samples + 1);
    evolve_master_with(&rho0.rho, &ham, &channels, opts, |info, rho| {
        let top = rho[[n_max, n_max]].re;
        if top >= TRUNCATION_TOL {
            return Err(Error::Truncation { t: info.t, top, n_max });
        }
        samples.push(HpSample { t: info.t, moments: fock_moments(rho, &d, &d2, &num) });
        Ok(())
    })?;
    Ok(HpTrajectory { solver: HpSolver::Fock, samples })
}

/// Excitation fraction `n / N` above which the bosonic picture is flagged.
pub const WEAK_EXCITATION_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpSqueezing {
    pub result: SqueezingResult,
    /// `n / N`.
    pub excitation_ratio: f64,
    pub weak_excitation_violated: bool,
}

/// `xi^2 = 1 + 2n - 2|m|` with the mean spin along the polarization axis.
pub fn hp_squeezing(s: &SecondMoments, n_spins: f64) -> Result<HpSqueezing> {
    if s.first.norm() >= 1e-9 {
        return Err(Error::invalid("first", "closed form needs <d> = 0"));
    }
    if !(n_spins > 0.0) {
        return Err(Error::invalid("n_spins", "must be positive"));
    }
    let xi2 = s.xi2();
    let beta_opt = (0.5 * s.m.arg() + std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
    let ratio = s.n / n_spins;
    Ok(HpSqueezing {
        result: SqueezingResult { xi2, xi2_db: db_or_neg_inf(xi2), theta: 0.0, phi: 0.0, beta_opt },
        excitation_ratio: ratio,
        weak_excitation_violated: ratio > WEAK_EXCITATION_LIMIT,
    })
}

/// Collective rates `Gamma_a = Gamma_b` of the squeezing figure, largest first.
pub const FIG4_GAMMAS: [f64; 3] = [0.1, 0.01, 0.001];
/// Dephasing rates in the order the caption lists them.
pub const FIG4_DEPHASING: [f64; 3] = [0.02, 0.03, 0.04];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig4Curve {
    pub gamma: f64,
    pub gamma_dep: f64,
    /// Pairs listed at the same position in the caption.
    pub caption_pair: bool,
    pub trajectory: HpTrajectory,
}

/// All nine `(Gamma, gamma_dep)` combinations, evolved from the vacuum.
pub fn fig4_grid(
    h: f64,
    lambda: f64,
    opts: &EvolveOptions,
    solver: HpSolver,
    n_max: usize,
    exec: Exec,
) -> Result<Vec<Fig4Curve>> {
    let mut combos = Vec::with_capacity(9);
    for (i, &g) in FIG4_GAMMAS.iter().enumerate() {
        for (k, &gd) in FIG4_DEPHASING.iter().enumerate() {
            combos.push((g, gd, i == k));
        }
    }
    par::map(exec, &combos, |&(g, gd, pair)| {
        let p = HpParams { h, lambda, gamma_a: g, gamma_b: g, gamma_dep: gd };
        let trajectory = match solver {
            HpSolver::Moments => evolve_moments(&SecondMoments::VACUUM, &p, opts)?,
            HpSolver::Fock => evolve_fock(&FockDensityMatrix::vacuum(n_max), &p, opts)?,
        };
        Ok(Fig4Curve { gamma: g, gamma_dep: gd, caption_pair: pair, trajectory })
    })
    .into_iter()
    .collect()
}
