//! Physical device description and the effective Raman parameters.
//!
//! The device is an NV ensemble coupled to the two normal modes (supermodes
//! `a`, `b`) of a pair of coupled cavities, with four classical microwave
//! drives closing four Raman paths between `|+>` and `|->`. After eliminating
//! the `|0>` level, the spin-supermode dynamics is fixed by a handful of
//! effective parameters ([`EffectiveRamanParams`]).
//!
//! The cavity-assisted coupling of each supermode enters only through the
//! products `L_alpha = sigma * alpha` and `L_beta = sigma * beta`. The split
//! into an amplitude `sigma` and normalized weights `(alpha, beta)` is a gauge
//! choice with no physical content, so only the products are stored.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Supermode frequencies and couplings from the symmetric/antisymmetric
/// combination of two coupled cavities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalModes {
    pub nu_a: f64,
    pub nu_b: f64,
    /// `g1..g4`: `g1, g2` couple supermode `a`, `g3, g4` couple `b`.
    pub g: [f64; 4],
}

/// Rewrites two cavities coupled with strength `epsilon` as supermodes
/// `a = (c1 + c2)/sqrt2` and `b = (c1 - c2)/sqrt2`.
///
/// `eta1`, `eta2` are the single-spin couplings of cavity 1 to the
/// `|0> -> |+>` and `|0> -> |->` transitions.
pub fn normal_mode_transform(omega_c1: f64, omega_c2: f64, epsilon: f64, eta1: f64, eta2: f64) -> Result<NormalModes> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", "cavity-cavity coupling must be positive"));
    }
    let mean = 0.5 * (omega_c1 + omega_c2);
    let g13 = eta1 / 2f64.sqrt();
    let g24 = eta2 / 2f64.sqrt();
    Ok(NormalModes { nu_a: mean + epsilon, nu_b: mean - epsilon, g: [g13, g24, g13, g24] })
}

/// Spin-supermode coupling, given either per spin or collectively enhanced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Single-spin couplings `g_k`.
    Single([f64; 4]),
    /// Collective couplings `sqrt(N) g_k`.
    Collective([f64; 4]),
}

/// Signed detunings of the four Raman legs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Detunings {
    fn check(&self) -> Result<()> {
        for (v, symbol) in [(self.a1, "Delta_a1"), (self.a2, "Delta_a2"), (self.b1, "Delta_b1"), (self.b2, "Delta_b2")]
        {
            if v == 0.0 {
                return Err(Error::ZeroDetuning { symbol });
            }
            if !v.is_finite() {
                return Err(Error::invalid(symbol, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn negated(&self) -> Self {
        Detunings { a1: -self.a1, a2: -self.a2, b1: -self.b1, b2: -self.b2 }
    }
}

/// Raw experimental parameters of the hybrid device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalDeviceParams {
    /// Number of NV spins `N`; kept as `f64` since realistic values are ~1e12.
    pub n_spins: f64,
    pub coupling: Coupling,
    /// Complex Rabi amplitudes `Omega_1..Omega_4`.
    pub omega_rabi: [Complex64; 4],
    pub delta: Detunings,
    /// Supermode decay rates `(kappa_a, kappa_b)`.
    pub kappa: [f64; 2],
    pub gamma_dep: f64,
    /// Zeeman splitting; only used by [`validate_regime`].
    pub delta_b: Option<f64>,
}

impl PhysicalDeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_spins > 0.0 && self.n_spins.is_finite()) {
            return Err(Error::invalid("n_spins", "must be positive and finite"));
        }
        for (k, name) in self.kappa.iter().zip(["kappa_a", "kappa_b"]) {
            if !(*k > 0.0 && k.is_finite()) {
                return Err(Error::invalid(name, "cavity decay must be positive"));
            }
        }
        let raw = match self.coupling {
            Coupling::Single(g) | Coupling::Collective(g) => g,
        };
        if raw.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return Err(Error::invalid("g", "couplings are non-negative magnitudes"));
        }
        if self.omega_rabi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("omega_rabi", "must be finite"));
        }
        if !(self.gamma_dep >= 0.0) {
            return Err(Error::invalid("gamma_dep", "must be non-negative"));
        }
        self.delta.check()
    }

    /// Single-spin couplings `g_k`.
    pub fn g(&self) -> [f64; 4] {
        match self.coupling {
            Coupling::Single(g) => g,
            Coupling::Collective(gc) => gc.map(|v| v / self.n_spins.sqrt()),
        }
    }

    /// Collective couplings `sqrt(N) g_k`.
    pub fn g_collective(&self) -> [f64; 4] {
        match self.coupling {
            Coupling::Single(g) => g.map(|v| v * self.n_spins.sqrt()),
            Coupling::Collective(gc) => gc,
        }
    }
}

/// Effective parameters after eliminating the `|0>` level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRamanParams {
    /// Collective Stark shift `mu0`.
    pub mu0: f64,
    pub zeta_a: f64,
    pub zeta_b: f64,
    /// Nonlinear `J_z a^dag a` coefficients. Reported only; the dynamics
    /// drops these terms.
    pub eta_a_minus: f64,
    pub eta_b_minus: f64,
    pub l_alpha_a: Complex64,
    pub l_beta_a: Complex64,
    pub l_alpha_b: Complex64,
    pub l_beta_b: Complex64,
}

impl EffectiveRamanParams {
    pub fn is_finite(&self) -> bool {
        [self.mu0, self.zeta_a, self.zeta_b, self.eta_a_minus, self.eta_b_minus].iter().all(|v| v.is_finite())
            && [self.l_alpha_a, self.l_beta_a, self.l_alpha_b, self.l_beta_b]
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Flat JSON record; complex products are split into `_re` / `_im` keys.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in [
            ("mu0", self.mu0),
            ("zeta_a", self.zeta_a),
            ("zeta_b", self.zeta_b),
            ("eta_a_minus", self.eta_a_minus),
            ("eta_b_minus", self.eta_b_minus),
        ] {
            m.insert(k.into(), v.into());
        }
        for (k, z) in [
            ("l_alpha_a", self.l_alpha_a),
            ("l_beta_a", self.l_beta_a),
            ("l_alpha_b", self.l_alpha_b),
            ("l_beta_b", self.l_beta_b),
        ] {
            m.insert(format!("{k}_re"), z.re.into());
            m.insert(format!("{k}_im"), z.im.into());
        }
        serde_json::Value::Object(m)
    }
}

/// Evaluates the effective Stark shift, supermode pulls and Raman products.
pub fn effective_raman_params(p: &PhysicalDeviceParams) -> Result<EffectiveRamanParams> {
    p.validate()?;
    let n = p.n_spins;
    let [g1, g2, g3, g4] = p.g();
    let [s1, s2, s3, s4] = p.g_collective();
    let [o1, o2, o3, o4] = p.omega_rabi;
    let Detunings { a1, a2, b1, b2 } = p.delta;

    let eta_a = g1 * g1 / a1 - g2 * g2 / a2;
    let eta_b = g3 * g3 / b1 - g4 * g4 / b2;
    let drive_shift = 0.25 * (o1.norm_sqr() / a2 + o2.norm_sqr() / a1 - o3.norm_sqr() / b2 - o4.norm_sqr() / b1);

    Ok(EffectiveRamanParams {
        mu0: eta_a + eta_b + drive_shift,
        zeta_a: 0.5 * n * eta_a,
        zeta_b: 0.5 * n * eta_b,
        eta_a_minus: eta_a,
        eta_b_minus: eta_b,
        l_alpha_a: o2.conj() * (s1 / (2.0 * a1)),
        l_beta_a: -o1.conj() * (s2 / (2.0 * a2)),
        l_alpha_b: o4.conj() * (s3 / (2.0 * b1)),
        l_beta_b: -o3.conj() * (s4 / (2.0 * b2)),
    })
}

/// A violated validity condition of the effective description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeWarning {
    /// Symbolic form of the required inequality `lhs >= rhs`.
    pub condition: String,
    pub lhs: f64,
    /// Right-hand side including the safety factor.
    pub rhs: f64,
    /// `rhs / lhs`; above one means violated, infinite when `lhs` vanishes.
    pub ratio: f64,
}

/// Default separation demanded by "much greater than" conditions.
pub const DEFAULT_REGIME_FACTOR: f64 = 10.0;

/// Checks the large-detuning and bad-cavity assumptions.
///
/// Each `>>` condition is tested as `lhs >= factor * scale`. Never fails; an
/// empty list means every condition holds.
pub fn validate_regime(p: &PhysicalDeviceParams, e: &EffectiveRamanParams, factor: f64) -> Vec<RegimeWarning> {
    let drive_scale = p.g().iter().copied().chain(p.omega_rabi.iter().map(|z| z.norm())).fold(0.0, f64::max);

    let mut out = Vec::new();
    let mut check = |condition: String, lhs: f64, scale: f64| {
        let rhs = factor * scale;
        let ratio = if lhs > 0.0 {
            rhs / lhs
        } else if rhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > 1.0 || lhs.is_nan() {
            out.push(RegimeWarning { condition, lhs, rhs, ratio });
        }
    };

    if let Some(db) = p.delta_b {
        check("delta_B >> g_k, |Omega_k|".into(), db, drive_scale);
    }
    let d = p.delta;
    check("|Delta_a1 + Delta_b1| >> g_k, |Omega_k|".into(), (d.a1 + d.b1).abs(), drive_scale);
    check("|Delta_a1 - Delta_b1| >> g_k, |Omega_k|".into(), (d.a1 - d.b1).abs(), drive_scale);
    check("|Delta_a2 + Delta_b2| >> g_k, |Omega_k|".into(), (d.a2 + d.b2).abs(), drive_scale);
    check("|Delta_a2 - Delta_b2| >> g_k, |Omega_k|".into(), (d.a2 - d.b2).abs(), drive_scale);

    for (name, kappa, zeta, la, lb) in
        [("a", p.kappa[0], e.zeta_a, e.l_alpha_a, e.l_beta_a), ("b", p.kappa[1], e.zeta_b, e.l_alpha_b, e.l_beta_b)]
    {
        let sigma = (la.norm_sqr() + lb.norm_sqr()).sqrt();
        check(
            format!("sqrt(kappa_{name}^2 + zeta_{name}^2) >> sigma_{name}, |mu0|"),
            kappa.hypot(zeta),
            sigma.max(e.mu0.abs()),
        );
    }
    out
}

/// The three parameter columns that realize named LMG variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    TwoAxis,
    Isotropic,
    OneAxis,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::TwoAxis, Preset::Isotropic, Preset::OneAxis];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TwoAxis => "two-axis",
            Preset::Isotropic => "isotropic",
            Preset::OneAxis => "one-axis",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-axis" => Ok(Preset::TwoAxis),
            "isotropic" => Ok(Preset::Isotropic),
            "one-axis" => Ok(Preset::OneAxis),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Spin number at which the tabulated collective coupling applies.
pub const PRESET_REFERENCE_N: f64 = 1e12;
/// Tabulated collective coupling `sqrt(N) g_k` at [`PRESET_REFERENCE_N`].
pub const PRESET_COLLECTIVE_G: f64 = 12.0;
/// Zeeman splitting assumed by the presets.
pub const PRESET_DELTA_B: f64 = 100.0;

/// Device parameters for one of the tabulated LMG variants.
///
/// The collective coupling is rescaled as `sqrt(n_spins / 1e12) * 12` so the
/// single-spin coupling stays fixed. Detuning signs and Rabi phases are chosen
/// so the signed Raman products come out as tabulated:
///
/// | preset    | detunings (a1, a2, b1, b2) | phase pi on    |
/// |-----------|----------------------------|----------------|
/// | two-axis  | +20, +80, +80, +20         | Omega_1        |
/// | isotropic | +20, +80, -80, -20         | none           |
/// | one-axis  | +30, +70, +50, +50         | Omega_1, Omega_3 |
pub fn table1_preset(preset: Preset, n_spins: f64, kappa: f64) -> PhysicalDeviceParams {
    let (mags, phases, delta) = match preset {
        Preset::TwoAxis => {
            ([4.0, 1.0, 1.0, 4.0], [PI, 0.0, 0.0, 0.0], Detunings { a1: 20.0, a2: 80.0, b1: 80.0, b2: 20.0 })
        }
        Preset::Isotropic => ([0.0, 1.0, 1.0, 0.0], [0.0; 4], Detunings { a1: 20.0, a2: 80.0, b1: -80.0, b2: -20.0 }),
        Preset::OneAxis => {
            ([7.0, 3.0, 0.77, 0.0], [PI, 0.0, PI, 0.0], Detunings { a1: 30.0, a2: 70.0, b1: 50.0, b2: 50.0 })
        }
    };
    let sqrt_n_g = (n_spins / PRESET_REFERENCE_N).sqrt() * PRESET_COLLECTIVE_G;
    let mut omega_rabi = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        omega_rabi[k] = Complex64::from_polar(mags[k], phases[k]);
    }
    PhysicalDeviceParams {
        n_spins,
        coupling: Coupling::Collective([sqrt_n_g; 4]),
        omega_rabi,
        delta,
        kappa: [kappa, kappa],
        gamma_dep: 0.0,
        delta_b: Some(PRESET_DELTA_B),
    }
}
