//! Adiabatic elimination of the two lossy supermodes and the resulting
//! generalized LMG Hamiltonian
//!
//! ```text
//! H_LMG = -2h Jz - (2 lambda / N) (Jx^2 + chi Jy^2)
//! ```
//!
//! with collective decay channels `(Gamma_i / N) D[T_i^dag]`.
//!
//! Everything is written in terms of the Raman products `L_alpha`, `L_beta`
//! of each channel, so no result depends on how `sigma` is split from
//! `(alpha, beta)`. For complex products the squares of the real theory
//! become `|L_alpha +- L_beta|^2` and `|L_alpha|^2 - |L_beta|^2`; a relative
//! phase between `L_alpha` and `L_beta` additionally produces a
//! `{Jx, Jy}` term outside the LMG family, reported as [`LmgParams::xy_twist`].

use num_complex::Complex64;
use serde::Serialize;

use crate::device::EffectiveRamanParams;
use crate::{Error, Result};

/// One supermode channel entering the elimination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub l_alpha: Complex64,
    pub l_beta: Complex64,
    pub zeta: f64,
    pub kappa: f64,
    /// `kappa^2 + zeta^2`.
    pub k_denominator: f64,
}

impl ChannelParams {
    pub fn new(l_alpha: Complex64, l_beta: Complex64, zeta: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid("kappa", "cavity decay must be positive"));
        }
        if !zeta.is_finite() {
            return Err(Error::invalid("zeta", "must be finite"));
        }
        Ok(ChannelParams { l_alpha, l_beta, zeta, kappa, k_denominator: kappa * kappa + zeta * zeta })
    }

    /// Channels `a` and `b` of a device at the given cavity decay rates.
    pub fn pair_from_raman(e: &EffectiveRamanParams, kappa: [f64; 2]) -> Result<[Self; 2]> {
        Ok([
            ChannelParams::new(e.l_alpha_a, e.l_beta_a, e.zeta_a, kappa[0])?,
            ChannelParams::new(e.l_alpha_b, e.l_beta_b, e.zeta_b, kappa[1])?,
        ])
    }

    /// `sigma^2 = |L_alpha|^2 + |L_beta|^2`, i.e. the `alpha^2 + beta^2 = 1` gauge.
    pub fn sigma_sq(&self) -> f64 {
        self.l_alpha.norm_sqr() + self.l_beta.norm_sqr()
    }
}

/// Result of eliminating one supermode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Elimination {
    /// Coherent coupling `Lambda = sigma^2 zeta / K`.
    pub lambda: f64,
    /// Collective decay `Gamma = sigma^2 kappa / K`.
    pub gamma: f64,
    /// Rate `kappa / K` multiplying `D[L_alpha^* J- + L_beta^* J+] / N`.
    pub jump_rate: f64,
    pub l_alpha: Complex64,
    pub l_beta: Complex64,
}

pub fn eliminate_channel(c: &ChannelParams) -> Elimination {
    let s2 = c.sigma_sq();
    Elimination {
        lambda: s2 * c.zeta / c.k_denominator,
        gamma: s2 * c.kappa / c.k_denominator,
        jump_rate: c.kappa / c.k_denominator,
        l_alpha: c.l_alpha,
        l_beta: c.l_beta,
    }
}

/// Microscopic origin of an [`LmgParams`] built in pipeline mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelOrigin {
    pub a: ChannelParams,
    pub b: ChannelParams,
    pub mu0: f64,
}

/// Generalized LMG parameters plus collective dissipation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LmgParams {
    pub h: f64,
    pub lambda: f64,
    pub chi: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_dep: f64,
    pub n_spins: f64,
    /// Set when `chi` was 0/0 and defaulted to the isotropic value 1.
    pub chi_degenerate: bool,
    /// Coefficient `c` of an extra `-(2c/N) {Jx, Jy}` term; zero whenever the
    /// Raman products of each channel share a phase.
    pub xy_twist: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<ChannelOrigin>,
}

impl LmgParams {
    /// Directly specified parameters, used for dimensionless runs.
    pub fn dimensionless(
        h: f64,
        lambda: f64,
        chi: f64,
        gamma_a: f64,
        gamma_b: f64,
        gamma_dep: f64,
        n_spins: f64,
    ) -> Result<Self> {
        for (v, name) in [
            (h, "h"),
            (lambda, "lambda"),
            (chi, "chi"),
            (gamma_a, "gamma_a"),
            (gamma_b, "gamma_b"),
            (gamma_dep, "gamma_dep"),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (v, name) in [(gamma_a, "gamma_a"), (gamma_b, "gamma_b"), (gamma_dep, "gamma_dep")] {
            if v < 0.0 {
                return Err(Error::invalid(name, "rates are non-negative"));
            }
        }
        if !(n_spins > 0.0) {
            return Err(Error::invalid("n_spins", "must be positive"));
        }
        Ok(LmgParams {
            h,
            lambda,
            chi,
            gamma_a,
            gamma_b,
            gamma_dep,
            n_spins,
            chi_degenerate: false,
            xy_twist: 0.0,
            origin: None,
        })
    }

    /// `r0 = gamma_dep / (2 Gamma_b)`.
    pub fn r0(&self) -> f64 {
        self.gamma_dep / (2.0 * self.gamma_b)
    }

    /// Per-channel `(Lambda_a, Lambda_b)` when built from device channels.
    pub fn channel_lambdas(&self) -> Option<(f64, f64)> {
        self.origin.map(|o| (eliminate_channel(&o.a).lambda, eliminate_channel(&o.b).lambda))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

/// Relative size below which the 0/0 form of `chi` is declared degenerate.
const CHI_DEGENERACY_TOL: f64 = 1e-12;

/// Combines both eliminated channels into the LMG triple.
pub fn lmg_params(a: &ChannelParams, b: &ChannelParams, mu0: f64, gamma_dep: f64, n_spins: f64) -> Result<LmgParams> {
    if !(n_spins > 0.0) {
        return Err(Error::invalid("n_spins", "must be positive"));
    }
    if !(gamma_dep >= 0.0) {
        return Err(Error::invalid("gamma_dep", "must be non-negative"));
    }

    let mut jz = 0.0; // sum zeta (|La|^2 - |Lb|^2) / K
    let mut plus = 0.0; // sum zeta |La + Lb|^2 / K
    let mut minus = 0.0; // sum zeta |La - Lb|^2 / K
    let mut twist = 0.0;
    let mut scale = 0.0;
    for c in [a, b] {
        let w = c.zeta / c.k_denominator;
        jz += w * (c.l_alpha.norm_sqr() - c.l_beta.norm_sqr());
        plus += w * (c.l_alpha + c.l_beta).norm_sqr();
        minus += w * (c.l_alpha - c.l_beta).norm_sqr();
        twist -= w * (c.l_alpha * c.l_beta.conj()).im;
        scale += w.abs() * (c.l_alpha.norm() + c.l_beta.norm()).powi(2);
    }

    let h = -0.5 * (mu0 - jz / n_spins);
    let lambda = 0.5 * plus;
    let tiny = CHI_DEGENERACY_TOL * scale;
    let (chi, chi_degenerate) =
        if plus.abs() <= tiny && minus.abs() <= tiny { (1.0, true) } else { (minus / plus, false) };

    Ok(LmgParams {
        h,
        lambda,
        chi,
        gamma_a: eliminate_channel(a).gamma,
        gamma_b: eliminate_channel(b).gamma,
        gamma_dep,
        n_spins,
        chi_degenerate,
        xy_twist: twist,
        origin: Some(ChannelOrigin { a: *a, b: *b, mu0 }),
    })
}

/// Pipeline shortcut: effective Raman parameters to LMG parameters.
pub fn lmg_from_raman(e: &EffectiveRamanParams, kappa: [f64; 2], gamma_dep: f64, n_spins: f64) -> Result<LmgParams> {
    let [a, b] = ChannelParams::pair_from_raman(e, kappa)?;
    lmg_params(&a, &b, e.mu0, gamma_dep, n_spins)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LmgVariant {
    TwoAxis,
    Isotropic,
    OneAxis,
    Generic,
}

impl LmgVariant {
    pub fn name(self) -> &'static str {
        match self {
            LmgVariant::TwoAxis => "two-axis",
            LmgVariant::Isotropic => "isotropic",
            LmgVariant::OneAxis => "one-axis",
            LmgVariant::Generic => "generic",
        }
    }
}

pub fn classify_variant(p: &LmgParams, tol: f64) -> LmgVariant {
    if (p.chi + 1.0).abs() <= tol {
        LmgVariant::TwoAxis
    } else if (p.chi - 1.0).abs() <= tol {
        LmgVariant::Isotropic
    } else if p.chi.abs() <= tol {
        LmgVariant::OneAxis
    } else {
        LmgVariant::Generic
    }
}
