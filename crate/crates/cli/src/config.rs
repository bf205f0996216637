//! TOML run configuration. Every command reads its section, fills gaps with
//! defaults and applies command-line overrides; the resolved config is what
//! the provenance sidecar records.

use std::path::{Path, PathBuf};

use lmg_core::device::{PhysicalDeviceParams, Preset};
use lmg_core::hpboson::HpSolver;
use lmg_core::semiclassical::{GridAxis, SecondAxis, SolveMode, SweepSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Params,
    PhaseSweep,
    Squeeze,
    EvolveDicke,
}

impl CommandName {
    pub fn name(self) -> &'static str {
        match self {
            CommandName::Params => "params",
            CommandName::PhaseSweep => "phase-sweep",
            CommandName::Squeeze => "squeeze",
            CommandName::EvolveDicke => "evolve-dicke",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsJob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_sweep: Option<SweepJob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeeze: Option<SqueezeJob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve_dicke: Option<DickeJob>,
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        RunConfig { command, out: None, params: None, phase_sweep: None, squeeze: None, evolve_dicke: None }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parse errors carry the line and field reported by the TOML parser.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default = "default_n_spins")]
    pub n_spins: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub gamma_dep: f64,
    #[serde(default = "default_regime_factor")]
    pub regime_factor: f64,
    /// Explicit device parameters; used instead of a preset when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<PhysicalDeviceParams>,
}

fn default_n_spins() -> f64 {
    1e12
}

fn default_kappa() -> f64 {
    0.1
}

fn default_regime_factor() -> f64 {
    lmg_core::device::DEFAULT_REGIME_FACTOR
}

impl Default for ParamsJob {
    fn default() -> Self {
        ParamsJob {
            preset: None,
            n_spins: default_n_spins(),
            kappa: default_kappa(),
            gamma_dep: 0.0,
            regime_factor: default_regime_factor(),
            device: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJob {
    #[serde(default)]
    pub mode: SolveMode,
    pub h: f64,
    pub lambda: GridAxis,
    pub second: SecondAxis,
    #[serde(default)]
    pub gamma_b: f64,
    #[serde(default)]
    pub gamma_dep: f64,
}

impl Default for SweepJob {
    fn default() -> Self {
        SweepJob {
            mode: SolveMode::Paper,
            h: 1.0,
            lambda: GridAxis::new(0.0, 3.0, 301),
            second: SecondAxis::GammaB(GridAxis::single(0.2)),
            gamma_b: 0.2,
            gamma_dep: 0.2,
        }
    }
}

impl SweepJob {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            h: self.h,
            lambda: self.lambda,
            second: self.second,
            gamma_b: self.gamma_b,
            gamma_dep: self.gamma_dep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeJob {
    #[serde(default)]
    pub solver: HpSolver,
    #[serde(default)]
    pub h: f64,
    pub lambda: f64,
    #[serde(default)]
    pub gamma_a: f64,
    #[serde(default)]
    pub gamma_b: f64,
    #[serde(default)]
    pub gamma_dep: f64,
    pub t_end: f64,
    #[serde(default = "default_hp_dt")]
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Run all nine rate combinations of the squeezing figure instead of the
    /// single rate set above.
    #[serde(default)]
    pub grid: bool,
    /// Spin number of an optional exact companion run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dicke_n: Option<usize>,
}

fn default_hp_dt() -> f64 {
    1e-3
}

fn default_samples() -> usize {
    200
}

fn default_n_max() -> usize {
    60
}

impl Default for SqueezeJob {
    fn default() -> Self {
        SqueezeJob {
            solver: HpSolver::Moments,
            h: 0.0,
            lambda: 1.0,
            gamma_a: 0.001,
            gamma_b: 0.001,
            gamma_dep: 0.02,
            t_end: 0.8,
            dt: default_hp_dt(),
            samples: default_samples(),
            n_max: default_n_max(),
            grid: false,
            dicke_n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeJob {
    pub n_spins: usize,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub gamma_a: f64,
    #[serde(default)]
    pub gamma_b: f64,
    #[serde(default)]
    pub gamma_dep: f64,
    /// Polar angles of the initial coherent state.
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    pub t_end: f64,
    #[serde(default = "default_dicke_dt")]
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_dicke_dt() -> f64 {
    2e-3
}

impl Default for DickeJob {
    fn default() -> Self {
        DickeJob {
            n_spins: 10,
            h: 1.0,
            lambda: 0.0,
            chi: 0.0,
            gamma_a: 0.0,
            gamma_b: 0.0,
            gamma_dep: 0.0,
            theta: 0.0,
            phi: 0.0,
            t_end: 1.0,
            dt: default_dicke_dt(),
            samples: default_samples(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_every_section() {
        let mut cfg = RunConfig::new(CommandName::PhaseSweep);
        cfg.out = Some("out/fig.csv".into());
        cfg.params = Some(ParamsJob { preset: Some(Preset::OneAxis), ..ParamsJob::default() });
        cfg.phase_sweep =
            Some(SweepJob { second: SecondAxis::GammaDep(GridAxis::new(0.0, 1.0, 11)), ..SweepJob::default() });
        cfg.squeeze = Some(SqueezeJob { dicke_n: Some(40), grid: true, ..SqueezeJob::default() });
        cfg.evolve_dicke = Some(DickeJob { theta: 0.785, ..DickeJob::default() });
        let text = cfg.to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn explicit_device_round_trips() {
        let mut cfg = RunConfig::new(CommandName::Params);
        cfg.params = Some(ParamsJob {
            device: Some(lmg_core::device::table1_preset(Preset::TwoAxis, 1e12, 0.1)),
            ..ParamsJob::default()
        });
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_line_and_field() {
        let err = RunConfig::parse("command = \"phase-sweep\"\n[phase_sweep]\nh = 1.0\nbogus = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4") && msg.contains("bogus"), "{msg}");
        assert!(RunConfig::parse("command = \"plot\"").is_err());
    }
}
