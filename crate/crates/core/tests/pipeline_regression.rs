//! Pinned outputs of the one-axis parameter pipeline.

use lmg_core::device::{effective_raman_params, table1_preset, Preset};
use lmg_core::lmgmap::lmg_from_raman;
use serde_json::Value;

const PINNED: &str = include_str!("data/one_axis_pipeline.json");

fn parse_key(key: &str) -> (f64, f64) {
    let mut n = None;
    let mut kappa = None;
    for part in key.split(',') {
        let (name, v) = part.split_once('=').unwrap();
        let v: f64 = v.parse().unwrap();
        match name {
            "n" => n = Some(v),
            "kappa" => kappa = Some(v),
            other => panic!("unknown key {other}"),
        }
    }
    (n.unwrap(), kappa.unwrap())
}

#[test]
fn one_axis_pipeline_matches_pinned_values() {
    let pinned: serde_json::Map<String, Value> = serde_json::from_str(PINNED).unwrap();
    assert_eq!(pinned.len(), 4);
    for (key, fields) in &pinned {
        let (n, kappa) = parse_key(key);
        let p = table1_preset(Preset::OneAxis, n, kappa);
        let e = effective_raman_params(&p).unwrap();
        let l = lmg_from_raman(&e, p.kappa, 0.0, n).unwrap();
        let got = [
            ("mu0", e.mu0),
            ("zeta_a", e.zeta_a),
            ("zeta_b", e.zeta_b),
            ("h", l.h),
            ("lambda", l.lambda),
            ("chi", l.chi),
            ("gamma_a", l.gamma_a),
            ("gamma_b", l.gamma_b),
        ];
        for (name, v) in got {
            let want = fields[name].as_f64().unwrap();
            let tol = 1e-12 * want.abs().max(1e-12);
            assert!((v - want).abs() <= tol, "{key} {name}: {v} vs pinned {want}");
        }
    }
}

#[test]
fn one_axis_effective_values_are_order_of_magnitude_consistent() {
    // loose check against the quoted ~0.25 and ~0.05 at N = 1e12
    let p = table1_preset(Preset::OneAxis, 1e12, 0.1);
    let l = lmg_from_raman(&effective_raman_params(&p).unwrap(), p.kappa, 0.0, 1e12).unwrap();
    assert!(l.lambda / 0.25 < 3.0 && l.lambda / 0.25 > 1.0 / 3.0);
    assert!(l.gamma_b / 0.05 < 3.0 && l.gamma_b / 0.05 > 1.0 / 3.0);
}
