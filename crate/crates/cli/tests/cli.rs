use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lmg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmg")).args(args).output().expect("binary runs")
}

fn figures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figures")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).expect("json output")
}

/// Parses a CSV into its header and rows of raw fields.
fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn close(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) if x.is_nan() && y.is_nan() => true,
        (Ok(x), Ok(y)) => x == y || (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-12),
        _ => a == b,
    }
}

fn run_figure(name: &str, dir: &Path) -> String {
    let cfg = figures().join(format!("{name}.toml"));
    let text = std::fs::read_to_string(&cfg).unwrap();
    let command = text.lines().find_map(|l| l.strip_prefix("command = ")).unwrap().trim_matches('"').to_owned();
    let out = dir.join(format!("{name}.csv"));
    let o = lmg(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), &command]);
    assert!(o.status.success(), "{name}: {}", stderr(&o));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn figure_configs_reproduce_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig2a", "fig2c", "fig2e", "fig3a", "fig3c", "fig3e", "fig4a", "fig4b"] {
        let got = run_figure(name, dir.path());
        let want = std::fs::read_to_string(figures().join(format!("expected/{name}.csv"))).unwrap();
        let (gh, gr) = read_csv(&got);
        let (wh, wr) = read_csv(&want);
        assert_eq!(gh, wh, "{name} header");
        assert_eq!(gr.len(), wr.len(), "{name} rows");
        for (i, (g, w)) in gr.iter().zip(&wr).enumerate() {
            assert_eq!(g.len(), w.len());
            for (a, b) in g.iter().zip(w) {
                assert!(close(a, b), "{name} row {i}: {a} vs {b}");
            }
        }
        let sidecar: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(format!("{name}.csv.run.json"))).unwrap())
                .unwrap();
        assert_eq!(sidecar["version"], env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn fig2a_magnetization_leaves_the_pole_near_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let (h, rows) = read_csv(&run_figure("fig2a", dir.path()));
    let lambda = column(&h, &rows, "lambda_over_gamma");
    let z = column(&h, &rows, "Z");
    let lc = column(&h, &rows, "lambda_c_over_gamma")[0];
    assert!((1.0..=1.02).contains(&lc), "lambda_c {lc}");
    for (l, z) in lambda.iter().zip(&z) {
        if *l < 1.0 {
            assert_eq!(*z, 1.0);
        }
    }
    let first_broken = lambda.iter().zip(&z).find(|(_, z)| z.is_finite() && **z < 1.0).map(|(l, _)| *l).unwrap();
    assert!(first_broken > 1.0 && first_broken <= 1.04, "{first_broken}");
}

#[test]
fn fig3_threshold_does_not_depend_on_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    let (h, rows) = read_csv(&run_figure("fig3e", dir.path()));
    let lc = column(&h, &rows, "lambda_c_over_gamma");
    assert!(lc.iter().all(|v| *v == lc[0]), "lambda_c varies");
    assert!((lc[0] - 1.0625).abs() < 1e-12);
}

#[test]
fn empty_grid_is_a_usage_error() {
    let o = lmg(&["phase-sweep", "--lambda-count", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn params_two_axis_and_one_axis() {
    let v = stdout_json(&lmg(&["params", "--preset", "two-axis"]));
    assert_eq!(v["variant"], "two-axis");
    assert!((v["lmg"]["lambda"].as_f64().unwrap() - 0.0666).abs() < 1e-3);
    assert!((v["lmg"]["chi"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let v = stdout_json(&lmg(&["params", "--preset", "one-axis"]));
    assert_eq!(v["variant"], "one-axis");
    let lambda = v["lmg"]["lambda"].as_f64().unwrap();
    assert!(v["lmg"]["chi"].as_f64().unwrap().abs() < 1e-12 * lambda);
}

#[test]
fn params_without_preset_is_a_usage_error() {
    let o = lmg(&["params"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("preset"));
    assert_eq!(lmg(&["params", "--preset", "three-axis"]).status.code(), Some(2));
}

#[test]
fn headline_squeezing_depth() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.csv");
    let o = lmg(&["squeeze", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&std::fs::read_to_string(&out).unwrap());
    let db = column(&h, &rows, "xi2_db");
    let t = column(&h, &rows, "t");
    let (i, min) = db.iter().enumerate().fold((0, f64::INFINITY), |a, (i, v)| if *v < a.1 { (i, *v) } else { a });
    // the quoted -9 dB is not reached with these rates; see the decisions ledger
    assert!((min + 8.579).abs() < 5e-3, "{min}");
    assert!((t[i] - 0.663).abs() < 3e-3, "{}", t[i]);
}

#[test]
fn strongest_dissipation_loses_squeezing_by_t3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.csv");
    let o = lmg(&["squeeze", "--gamma", "0.1", "--gamma-dep", "0.04", "--t-end", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&std::fs::read_to_string(&out).unwrap());
    assert!(*column(&h, &rows, "xi2").last().unwrap() > 1.0);
}

#[test]
fn no_coupling_no_squeezing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.csv");
    let o = lmg(&["squeeze", "--lambda", "0", "--gamma", "0", "--gamma-dep", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&std::fs::read_to_string(&out).unwrap());
    assert!(column(&h, &rows, "xi2").iter().all(|x| (x - 1.0).abs() < 1e-12));
}

#[test]
fn two_spin_larmor_precession() {
    let o = lmg(&[
        "evolve-dicke",
        "--n",
        "2",
        "--h",
        "1",
        "--theta",
        "1.5707963267948966",
        "--t-end",
        "2",
        "--samples",
        "20",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&String::from_utf8(o.stdout).unwrap());
    let t = column(&h, &rows, "t");
    let jx = column(&h, &rows, "jx");
    assert_eq!(t.len(), 21);
    for (t, jx) in t.iter().zip(&jx) {
        assert!((jx - (2.0 * t).cos()).abs() < 1e-8, "t={t}: {jx}");
    }
}

#[test]
fn zero_spins_is_rejected() {
    let o = lmg(&["evolve-dicke", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected() {
    assert_eq!(lmg(&["--threads", "0", "params", "--preset", "two-axis"]).status.code(), Some(2));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = figures().join("fig4a.toml");
    for (p, threads) in [(&a, "1"), (&b, "4")] {
        let o =
            lmg(&["--config", cfg.to_str().unwrap(), "--threads", threads, "--out", p.to_str().unwrap(), "squeeze"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn emitted_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("run.toml");
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let o = lmg(&[
        "--emit-config",
        emitted.to_str().unwrap(),
        "--out",
        first.to_str().unwrap(),
        "phase-sweep",
        "--gamma-b",
        "0.6",
        "--lambda-count",
        "41",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = lmg(&["--config", emitted.to_str().unwrap(), "--out", second.to_str().unwrap(), "phase-sweep"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn mismatched_or_malformed_config_is_a_usage_error() {
    let o = lmg(&["--config", figures().join("fig2a.toml").to_str().unwrap(), "squeeze"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "command = \"phase-sweep\"\n[phase_sweep]\nh = 1.0\nlambada = 2\n").unwrap();
    let o = lmg(&["--config", bad.to_str().unwrap(), "phase-sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lambada"), "{}", stderr(&o));
}

#[test]
fn fock_truncation_failure_is_numerical() {
    let o = lmg(&["squeeze", "--solver", "fock", "--n-max", "4", "--t-end", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("n_max"), "{}", stderr(&o));
}

#[test]
fn dicke_companion_needs_an_output_path() {
    let o = lmg(&["squeeze", "--dicke-n", "10", "--t-end", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.csv");
    let o = lmg(&["squeeze", "--dicke-n", "40", "--t-end", "0.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&std::fs::read_to_string(dir.path().join("sq.dicke.csv")).unwrap());
    let xi = column(&h, &rows, "xi2");
    assert!((xi[0] - 1.0).abs() < 1e-9);
    assert!(xi.last().unwrap() < &1.0);
}
