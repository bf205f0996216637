//! The four subcommands. Each returns the data file contents plus a JSON
//! summary for the sidecar and stderr.

use lmg_core::csv::{num, CsvTable};
use lmg_core::device::{effective_raman_params, table1_preset, validate_regime};
use lmg_core::dicke::{
    build_lmg_hamiltonian, build_operators, build_variant_dissipators, coherent_spin_state, evolve_master,
    EvolveOptions,
};
use lmg_core::hpboson::{
    evolve_fock, evolve_moments, fig4_grid, FockDensityMatrix, HpParams, HpSolver, HpTrajectory, SecondMoments,
    HP_CSV_HEADER,
};
use lmg_core::lmgmap::{classify_variant, lmg_from_raman, LmgParams, LmgVariant};
use lmg_core::par::Exec;
use lmg_core::semiclassical::{sweep_csv, sweep_phase_diagram_with, transition_jumps, SweepBranch};
use lmg_core::squeezing::{squeezing_parameter, to_db};
use serde_json::{json, Value};

use crate::config::{DickeJob, ParamsJob, SqueezeJob, SweepJob};
use crate::CliError;

/// Tolerance for naming the LMG variant of a parameter set.
const VARIANT_TOL: f64 = 1e-9;

pub struct Output {
    pub data: String,
    pub summary: Value,
    /// Extra files as `(suffix, contents)`, written next to the main output.
    pub companions: Vec<(&'static str, String)>,
}

pub fn params(job: &ParamsJob) -> Result<Output, CliError> {
    let device = match (&job.device, job.preset) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => {
            let mut d = table1_preset(p, job.n_spins, job.kappa);
            d.gamma_dep = job.gamma_dep;
            d
        }
        (None, None) => {
            return Err(CliError::Config("missing preset: pass --preset or give [params] preset/device".into()))
        }
    };
    let e = effective_raman_params(&device)?;
    let warnings = validate_regime(&device, &e, job.regime_factor);
    let l = lmg_from_raman(&e, device.kappa, device.gamma_dep, device.n_spins)?;
    let variant = classify_variant(&l, VARIANT_TOL);
    let record = json!({
        "device": device,
        "effective": e.to_json(),
        "lmg": l.to_json(),
        "variant": variant.name(),
        "regime_warnings": warnings,
    });
    let summary = json!({
        "variant": variant.name(),
        "lambda": l.lambda,
        "chi": l.chi,
        "gamma_a": l.gamma_a,
        "gamma_b": l.gamma_b,
        "regime_warnings": warnings.len(),
    });
    Ok(Output { data: serde_json::to_string_pretty(&record).expect("json") + "\n", summary, companions: vec![] })
}

pub fn phase_sweep(job: &SweepJob, exec: Exec) -> Result<Output, CliError> {
    let records = sweep_phase_diagram_with(&job.spec(), job.mode, exec)?;
    let gaps = records.iter().filter(|r| r.branch == SweepBranch::Gap).count();
    let jumps = transition_jumps(&records);
    let summary = json!({
        "points": records.len(),
        "gaps": gaps,
        "mode": job.mode.name(),
        "transitions": jumps,
    });
    Ok(Output { data: sweep_csv(&records), summary, companions: vec![] })
}

fn hp_params(job: &SqueezeJob) -> HpParams {
    HpParams { h: job.h, lambda: job.lambda, gamma_a: job.gamma_a, gamma_b: job.gamma_b, gamma_dep: job.gamma_dep }
}

fn db(x: f64) -> f64 {
    to_db(x).unwrap_or(f64::NEG_INFINITY)
}

fn trajectory_summary(traj: &HpTrajectory) -> Value {
    let (t_min, x_min) = traj.min_xi2(f64::INFINITY).unwrap_or((f64::NAN, f64::NAN));
    let last = traj.last().moments.xi2();
    json!({ "min_xi2": x_min, "min_xi2_db": db(x_min), "t_min": t_min, "final_xi2": last })
}

pub fn squeeze(job: &SqueezeJob, exec: Exec) -> Result<Output, CliError> {
    let opts = EvolveOptions { t_end: job.t_end, dt: job.dt, samples: job.samples };
    let mut out = if job.grid {
        let curves = fig4_grid(job.h, job.lambda, &opts, job.solver, job.n_max, exec)?;
        let mut header = vec!["gamma", "gamma_dep", "caption_pair"];
        header.extend(HP_CSV_HEADER);
        let mut t = CsvTable::new(&header);
        let mut per_curve = Vec::new();
        for c in &curves {
            for s in &c.trajectory.samples {
                let x = s.moments.xi2();
                t.push_row(&[
                    num(c.gamma),
                    num(c.gamma_dep),
                    c.caption_pair.to_string(),
                    num(s.t),
                    num(s.moments.n),
                    num(s.moments.m.re),
                    num(s.moments.m.im),
                    num(x),
                    num(db(x)),
                    c.trajectory.solver.name().to_string(),
                ]);
            }
            let mut v = trajectory_summary(&c.trajectory);
            v["gamma"] = json!(c.gamma);
            v["gamma_dep"] = json!(c.gamma_dep);
            v["caption_pair"] = json!(c.caption_pair);
            per_curve.push(v);
        }
        Output {
            data: t.render(),
            summary: json!({ "solver": job.solver.name(), "curves": per_curve }),
            companions: vec![],
        }
    } else {
        let p = hp_params(job);
        let traj = match job.solver {
            HpSolver::Moments => evolve_moments(&SecondMoments::VACUUM, &p, &opts)?,
            HpSolver::Fock => evolve_fock(&FockDensityMatrix::vacuum(job.n_max), &p, &opts)?,
        };
        let mut summary = trajectory_summary(&traj);
        summary["solver"] = json!(job.solver.name());
        Output { data: traj.to_csv(), summary, companions: vec![] }
    };
    if let Some(n) = job.dicke_n {
        let (csv, last) = dicke_companion(job, n)?;
        out.summary["dicke_companion"] = json!({ "n_spins": n, "final_xi2": last });
        out.companions.push(("dicke.csv", csv));
    }
    Ok(out)
}

/// Exact two-axis run from the polarized state. Near `|j, j>` the boson
/// `d` lowers `m` towards `j`, so its decay `Gamma_a D[d]` is the collective
/// `J+` channel and `Gamma_b D[d^dag]` the `J-` channel.
fn dicke_companion(job: &SqueezeJob, n: usize) -> Result<(String, f64), CliError> {
    let p = LmgParams::dimensionless(job.h, job.lambda, -1.0, job.gamma_b, job.gamma_a, job.gamma_dep, n as f64)?;
    let ops = build_operators(n)?;
    let ham = build_lmg_hamiltonian(&ops, &p)?;
    let chans = build_variant_dissipators(&ops, &p, LmgVariant::TwoAxis)?;
    let rho0 = coherent_spin_state(n, 0.0, 0.0)?;
    let dt = job.dt.min(2e-3);
    let traj = evolve_master(&ops, &rho0, &ham, &chans, &EvolveOptions { t_end: job.t_end, dt, samples: job.samples })?;
    let mut t = CsvTable::new(&["t", "xi2", "xi2_db", "jz_over_j"]);
    let mut last = f64::NAN;
    for s in &traj.samples {
        // a fully depolarized state has no squeezing frame
        let x = squeezing_parameter(&s.moments).map(|r| r.xi2).unwrap_or(f64::NAN);
        last = x;
        t.push_row(&[num(s.t), num(x), num(db(x)), num(s.moments.first[2] / ops.j())]);
    }
    Ok((t.render(), last))
}

pub fn evolve_dicke(job: &DickeJob) -> Result<Output, CliError> {
    let ops = build_operators(job.n_spins)?;
    let p = LmgParams::dimensionless(
        job.h,
        job.lambda,
        job.chi,
        job.gamma_a,
        job.gamma_b,
        job.gamma_dep,
        job.n_spins as f64,
    )?;
    let variant = classify_variant(&p, VARIANT_TOL);
    let ham = build_lmg_hamiltonian(&ops, &p)?;
    let chans = build_variant_dissipators(&ops, &p, variant)?;
    let rho0 = coherent_spin_state(job.n_spins, job.theta, job.phi)?;
    let opts = EvolveOptions { t_end: job.t_end, dt: job.dt, samples: job.samples };
    let traj = evolve_master(&ops, &rho0, &ham, &chans, &opts)?;
    let j = ops.j();
    let last = traj.last();
    let min_eig = traj.samples.iter().map(|s| s.min_eig).fold(f64::INFINITY, f64::min);
    let summary = json!({
        "variant": variant.name(),
        "dt": traj.dt,
        "steps": traj.steps,
        "final_bloch": last.moments.first.map(|v| v / j),
        "min_eigenvalue": min_eig,
    });
    Ok(Output { data: traj.to_csv(), summary, companions: vec![] })
}
