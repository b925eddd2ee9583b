//! Trial, sweep and CLI behaviour.

use std::process::Command;

use ris_antijam::config::ScenarioConfig;
use ris_antijam::harness::{
    load_scenario, load_scenario_over, run_paired_trial, run_sweep, run_trial, trial_channels, Axis, HarnessError,
};
use ris_antijam::optimizer::Scheme;

fn small() -> ScenarioConfig {
    ScenarioConfig { trials: 4, ..ScenarioConfig::desk() }
}

#[test]
fn trial_is_deterministic() {
    let cfg = small();
    for scheme in Scheme::ALL {
        let a = run_trial(&cfg, scheme, 2).unwrap();
        let b = run_trial(&cfg, scheme, 2).unwrap();
        assert_eq!(a.rate_bits.to_bits(), b.rate_bits.to_bits());
        assert_eq!(a.objective_bits.to_bits(), b.objective_bits.to_bits());
    }
}

#[test]
fn schemes_share_channels_within_a_trial() {
    let cfg = small();
    let a = trial_channels(&cfg, 1).unwrap();
    let b = trial_channels(&cfg, 1).unwrap();
    assert_eq!(a.h_bu, b.h_bu);
    assert_eq!(a.g_br, b.g_br);
    assert_ne!(trial_channels(&cfg, 2).unwrap().h_bu, a.h_bu);
    let paired = run_paired_trial(&cfg, &Scheme::ALL, 1).unwrap();
    for (o, s) in paired.iter().zip(Scheme::ALL) {
        assert_eq!(o.rate_bits, run_trial(&cfg, s, 1).unwrap().rate_bits);
    }
}

#[test]
fn sweep_csv_layout_and_reproducibility() {
    let cfg = small();
    let first = run_sweep(&cfg, Axis::B, &[2.0, 4.0], &Scheme::ALL).unwrap().to_csv();
    let second = run_sweep(&cfg, Axis::B, &[2.0, 4.0], &Scheme::ALL).unwrap().to_csv();
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "axis,value,scheme,mean_rate_bits,stderr,trials,seed,objective_bits");
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[1].starts_with("B,2,active,"));
    assert!(lines[6].starts_with("B,4,no-ris,"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 8 && l.contains(",4,1,")));
}

#[test]
fn iteration_axis_emits_objective_trace() {
    let cfg = small();
    let res = run_sweep(&cfg, Axis::Iterations, &[], &[Scheme::Active]).unwrap();
    let trace = run_trial(&cfg, Scheme::Active, 0).unwrap().report.objective_bits();
    assert_eq!(res.rows.len(), trace.len());
    for (row, v) in res.rows.iter().zip(&trace) {
        assert_eq!(row.mean_rate_bits, *v);
        assert_eq!(row.trials, 1);
    }
}

#[test]
fn stderr_shrinks_like_inverse_sqrt_trials() {
    let mut se = Vec::new();
    for t in [25usize, 100, 400] {
        let cfg = ScenarioConfig { trials: t, ..ScenarioConfig::desk() };
        let res = run_sweep(&cfg, Axis::M, &[8.0], &[Scheme::NoRis]).unwrap();
        se.push(res.rows[0].stderr * (t as f64).sqrt());
    }
    // stderr·√n estimates the per-trial spread, which should not drift.
    for s in &se[1..] {
        let ratio = s / se[0];
        assert!((0.6..1.6).contains(&ratio), "{se:?}");
    }
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.cfg");
    std::fs::write(&path, "# desk-sized run\nN = 4\nM = 8\nK = 2\nQ = 1\nB = 2\ntrials = 3\np_max_dbm = 25\n").unwrap();
    let cfg = load_scenario(&path).unwrap();
    assert_eq!(cfg, ScenarioConfig { trials: 3, p_max_dbm: 25.0, ..ScenarioConfig::desk() });

    std::fs::write(&path, "").unwrap();
    assert_eq!(load_scenario(&path).unwrap(), ScenarioConfig::paper());
    assert_eq!(load_scenario_over(&path, ScenarioConfig::desk()).unwrap(), ScenarioConfig::desk());
    assert!(matches!(load_scenario(&dir.path().join("missing")), Err(HarnessError::Io { .. })));
}

#[test]
fn cli_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_ris-antijam"))
        .args(["--profile", "desk", "--trials", "2", "--sweep", "B", "--values", "2,4", "--scheme", "no-ris", "--seed", "7"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",no-ris,") && r.contains(",2,7,")));

    let bad = Command::new(env!("CARGO_BIN_EXE_ris-antijam")).args(["--profile", "desk", "--sweep", "gain"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown sweep axis"));
}
