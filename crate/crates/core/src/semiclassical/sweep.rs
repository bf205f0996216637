//! Phase-diagram sweeps over `lambda` and one dissipation rate, all in units
//! of a reference rate `gamma`.

use serde::{Deserialize, Serialize};

use super::steady::{steady_state_oracle, steady_state_paper, Branch, SolveMode};
use super::{critical_coupling, BlochVector, MeanFieldParams};
use crate::csv::{num, CsvTable};
use crate::par::{self, Exec};
use crate::{Error, Result};

/// Uniform grid `start..=stop` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        GridAxis { start, stop, count }
    }

    pub fn single(value: f64) -> Self {
        GridAxis { start: value, stop: value, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n).map(|k| self.start + k as f64 * step).collect()
            }
        }
    }
}

/// The rate swept alongside `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "axis")]
pub enum SecondAxis {
    GammaB(GridAxis),
    GammaDep(GridAxis),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub h: f64,
    pub lambda: GridAxis,
    pub second: SecondAxis,
    /// Used when the second axis is `gamma_dep`.
    pub gamma_b: f64,
    /// Used when the second axis is `gamma_b`.
    pub gamma_dep: f64,
}

impl SweepSpec {
    fn points(&self) -> Vec<(f64, f64, f64)> {
        let lambdas = self.lambda.values();
        let mut out = Vec::new();
        match self.second {
            SecondAxis::GammaB(ax) => {
                for gb in ax.values() {
                    out.extend(lambdas.iter().map(|&l| (l, gb, self.gamma_dep)));
                }
            }
            SecondAxis::GammaDep(ax) => {
                for gd in ax.values() {
                    out.extend(lambdas.iter().map(|&l| (l, self.gamma_b, gd)));
                }
            }
        }
        out
    }
}

/// First and quadratic moments at one grid point, factorized as mean field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSweepPoint {
    pub lambda_over_gamma: f64,
    pub gamma_b_over_gamma: f64,
    pub gamma_dep_over_gamma: f64,
    pub h_over_gamma: f64,
    pub first_moments: BlochVector,
    /// `(X^2, Y^2, Z^2)`.
    pub quadratic_moments: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepBranch {
    Normal,
    BrokenPlus,
    /// No steady state could be evaluated at this point.
    Gap,
}

impl SweepBranch {
    pub fn name(self) -> &'static str {
        match self {
            SweepBranch::Normal => "normal",
            SweepBranch::BrokenPlus => "broken-plus",
            SweepBranch::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub point: PhaseSweepPoint,
    pub branch: SweepBranch,
    pub mode: SolveMode,
    pub residual_norm: f64,
    pub lambda_c_over_gamma: f64,
    /// Why a gap row has no state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_reason: Option<String>,
}

fn evaluate(h: f64, lambda: f64, gamma_b: f64, gamma_dep: f64, mode: SolveMode) -> SweepRecord {
    let p = MeanFieldParams::new(h, lambda, gamma_b, gamma_dep);
    let solved = match mode {
        SolveMode::Paper => steady_state_paper(&p),
        SolveMode::Oracle => steady_state_oracle(&p),
    };
    let picked = solved.and_then(|states| {
        states
            .iter()
            .find(|s| s.branch == Branch::BrokenPlus)
            .or_else(|| states.iter().find(|s| s.branch == Branch::Normal))
            .copied()
            .ok_or_else(|| Error::NoBrokenSolution("no plottable branch".into()))
    });
    let (first, branch, residual_norm, gap_reason) = match picked {
        Ok(s) => {
            let b = if s.branch == Branch::Normal { SweepBranch::Normal } else { SweepBranch::BrokenPlus };
            (s.bloch, b, s.residual_norm(), None)
        }
        Err(e) => (BlochVector::new(f64::NAN, f64::NAN, f64::NAN), SweepBranch::Gap, f64::NAN, Some(e.to_string())),
    };
    SweepRecord {
        point: PhaseSweepPoint {
            lambda_over_gamma: lambda,
            gamma_b_over_gamma: gamma_b,
            gamma_dep_over_gamma: gamma_dep,
            h_over_gamma: h,
            first_moments: first,
            quadratic_moments: [first.x * first.x, first.y * first.y, first.z * first.z],
        },
        branch,
        mode,
        residual_norm,
        lambda_c_over_gamma: critical_coupling(h, gamma_b).unwrap_or(f64::NAN),
        gap_reason,
    }
}

/// Evaluates every grid point (second axis outer, `lambda` inner).
///
/// Per-point failures become [`SweepBranch::Gap`] records; only an empty grid
/// is an error.
pub fn sweep_phase_diagram_with(spec: &SweepSpec, mode: SolveMode, exec: Exec) -> Result<Vec<SweepRecord>> {
    let points = spec.points();
    if points.is_empty() {
        return Err(Error::invalid("grid", "sweep grid is empty"));
    }
    Ok(par::map(exec, &points, |&(l, gb, gd)| evaluate(spec.h, l, gb, gd, mode)))
}

pub fn sweep_phase_diagram(spec: &SweepSpec, mode: SolveMode) -> Result<Vec<SweepRecord>> {
    sweep_phase_diagram_with(spec, mode, Exec::default())
}

/// Change of `Z` across the critical coupling along one `lambda` line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionJump {
    pub gamma_b_over_gamma: f64,
    pub gamma_dep_over_gamma: f64,
    pub lambda_c_over_gamma: f64,
    /// Last normal-branch grid point below `lambda_c`.
    pub lambda_before: f64,
    /// First broken-branch grid point at or above `lambda_c`.
    pub lambda_after: f64,
    pub delta_z: f64,
}

/// Reports `|dZ|` between the last normal point below `lambda_c` and the
/// first broken point above it, for every `lambda` line in `records`.
///
/// Lines without both points (e.g. all gaps above threshold) are skipped.
pub fn transition_jumps(records: &[SweepRecord]) -> Vec<TransitionJump> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let key = |r: &SweepRecord| (r.point.gamma_b_over_gamma, r.point.gamma_dep_over_gamma);
        let k0 = key(&records[start]);
        let end = records[start..].iter().position(|r| key(r) != k0).map_or(records.len(), |n| start + n);
        let line = &records[start..end];
        start = end;
        let lc = line[0].lambda_c_over_gamma;
        let before = line.iter().rfind(|r| r.point.lambda_over_gamma < lc && r.branch == SweepBranch::Normal);
        let after = line.iter().find(|r| r.point.lambda_over_gamma >= lc && r.branch == SweepBranch::BrokenPlus);
        if let (Some(b), Some(a)) = (before, after) {
            out.push(TransitionJump {
                gamma_b_over_gamma: k0.0,
                gamma_dep_over_gamma: k0.1,
                lambda_c_over_gamma: lc,
                lambda_before: b.point.lambda_over_gamma,
                lambda_after: a.point.lambda_over_gamma,
                delta_z: (a.point.first_moments.z - b.point.first_moments.z).abs(),
            });
        }
    }
    out
}

pub const SWEEP_CSV_HEADER: [&str; 13] = [
    "lambda_over_gamma",
    "gamma_b_over_gamma",
    "gamma_dep_over_gamma",
    "X",
    "Y",
    "Z",
    "X2",
    "Y2",
    "Z2",
    "branch",
    "mode",
    "residual_norm",
    "lambda_c_over_gamma",
];

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut t = CsvTable::new(&SWEEP_CSV_HEADER);
    for r in records {
        let p = &r.point;
        let q = p.quadratic_moments;
        t.push_row(&[
            num(p.lambda_over_gamma),
            num(p.gamma_b_over_gamma),
            num(p.gamma_dep_over_gamma),
            num(p.first_moments.x),
            num(p.first_moments.y),
            num(p.first_moments.z),
            num(q[0]),
            num(q[1]),
            num(q[2]),
            r.branch.name().to_string(),
            r.mode.name().to_string(),
            num(r.residual_norm),
            num(r.lambda_c_over_gamma),
        ]);
    }
    t.render()
}
