//! Monte-Carlo trials, parameter sweeps and CSV output.

mod scenario;

pub use scenario::{load_scenario, load_scenario_over, parse_scenario, KEYS};

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{sample_static_channels, sample_uncertain_realization, stream, substream, ChannelError, ChannelSet};
use crate::config::ScenarioConfig;
use crate::optimizer::{scheme_rate, ssca_ao, AoOptions, AoReport, OptimizerError, Scheme};
use crate::system::PowerModel;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown sweep axis '{0}' (expected M, e_mse, p_max_dbm, alpha_r, B or iterations)")]
    UnknownAxis(String),
    #[error("trial {trial}: {source}")]
    Channel { trial: usize, source: ChannelError },
    #[error("trial {trial}, {scheme}: {source}")]
    Optimizer { trial: usize, scheme: Scheme, source: OptimizerError },
    #[error("writing CSV: {0}")]
    Write(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    M,
    EMse,
    PMaxDbm,
    AlphaR,
    B,
    Iterations,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::M => "M",
            Axis::EMse => "e_mse",
            Axis::PMaxDbm => "p_max_dbm",
            Axis::AlphaR => "alpha_r",
            Axis::B => "B",
            Axis::Iterations => "iterations",
        }
    }

    /// Grid used when no values are given.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            Axis::M => vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0],
            Axis::EMse => vec![0.0, 0.05, 0.1, 0.2],
            Axis::PMaxDbm => vec![20.0, 25.0, 30.0, 35.0, 40.0],
            Axis::AlphaR => vec![2.0, 2.2, 2.4, 2.6],
            Axis::B => vec![2.0, 4.0, 6.0, 8.0],
            Axis::Iterations => Vec::new(),
        }
    }

    /// `cfg` with the axis set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, HarnessError> {
        let mut c = cfg.clone();
        let count = |v: f64| {
            if v >= 0.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(HarnessError::Validation(format!("{} needs a whole number, got {v}", self.name()))) }
        };
        match self {
            Axis::M => c.m = count(value)?,
            Axis::EMse => c.e_mse = value,
            Axis::PMaxDbm => c.p_max_dbm = value,
            Axis::AlphaR => {
                c.alpha_br = value;
                c.alpha_ru = value;
            }
            Axis::B => c.b = count(value)?,
            Axis::Iterations => {}
        }
        c.validate().map_err(HarnessError::Validation)?;
        Ok(c)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" => Ok(Axis::M),
            "e_mse" | "emse" => Ok(Axis::EMse),
            "p_max_dbm" | "p_max" | "pmax" => Ok(Axis::PMaxDbm),
            "alpha_r" | "alphar" => Ok(Axis::AlphaR),
            "b" => Ok(Axis::B),
            "iterations" | "iter" => Ok(Axis::Iterations),
            _ => Err(HarnessError::UnknownAxis(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    /// Sum rate on the held-out realizations, bits per channel use.
    pub rate_bits: f64,
    /// Sample-average objective on the optimization realizations, bits.
    pub objective_bits: f64,
    pub report: AoReport,
}

/// Static channels of trial `trial`; every scheme and sweep value with the
/// same seed and trial index uses the same stream.
pub fn trial_channels(cfg: &ScenarioConfig, trial: usize) -> Result<ChannelSet, HarnessError> {
    sample_static_channels(&cfg.geometry, cfg, &mut substream(cfg.seed, &[trial as u64, stream::CHANNELS]))
        .map_err(|source| HarnessError::Channel { trial, source })
}

fn solve_on(cs: &ChannelSet, cfg: &ScenarioConfig, scheme: Scheme, trial: usize) -> Result<TrialOutcome, HarnessError> {
    let mut rng = substream(cfg.seed, &[trial as u64, stream::OPTIMIZE]);
    let report = ssca_ao(cs, cfg, scheme, &AoOptions::from_config(cfg), &mut rng)
        .map_err(|source| HarnessError::Optimizer { trial, scheme, source })?;
    let mut eval_rng = substream(cfg.seed, &[trial as u64, stream::EVALUATE]);
    let held_out: Vec<_> =
        (0..cfg.eval_realizations).map(|i| sample_uncertain_realization(cs, cfg.e_mse, cfg, i + 1, &mut eval_rng)).collect();
    let pm = PowerModel::from_config(cfg);
    let rate_bits = scheme_rate(scheme, &report.state, &held_out, cs, &pm) / std::f64::consts::LN_2;
    Ok(TrialOutcome { rate_bits, objective_bits: report.final_objective / std::f64::consts::LN_2, report })
}

pub fn run_trial(cfg: &ScenarioConfig, scheme: Scheme, trial: usize) -> Result<TrialOutcome, HarnessError> {
    solve_on(&trial_channels(cfg, trial)?, cfg, scheme, trial)
}

/// Runs every scheme of one trial on a shared channel draw.
pub fn run_paired_trial(cfg: &ScenarioConfig, schemes: &[Scheme], trial: usize) -> Result<Vec<TrialOutcome>, HarnessError> {
    let cs = trial_channels(cfg, trial)?;
    schemes.iter().map(|&s| solve_on(&cs, cfg, s, trial)).collect()
}

pub fn baseline_passive<R: Rng + ?Sized>(cs: &ChannelSet, cfg: &ScenarioConfig, rng: &mut R) -> Result<AoReport, OptimizerError> {
    ssca_ao(cs, cfg, Scheme::Passive, &AoOptions::from_config(cfg), rng)
}

pub fn baseline_noris<R: Rng + ?Sized>(cs: &ChannelSet, cfg: &ScenarioConfig, rng: &mut R) -> Result<AoReport, OptimizerError> {
    ssca_ao(cs, cfg, Scheme::NoRis, &AoOptions::from_config(cfg), rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub scheme: Scheme,
    pub mean_rate_bits: f64,
    pub stderr: f64,
    pub trials: usize,
    pub objective_bits: f64,
    /// Smallest constraint slack over every trial of the row.
    pub worst_slack: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    /// Wall-clock time per axis value.
    pub elapsed: Vec<Duration>,
}

impl SweepResult {
    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "axis,value,scheme,mean_rate_bits,stderr,trials,seed,objective_bits")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.axis,
                sig6(r.value),
                r.scheme,
                sig6(r.mean_rate_bits),
                sig6(r.stderr),
                r.trials,
                self.seed,
                sig6(r.objective_bits)
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Formats with six significant digits, trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let s = format!("{:.*}", (5 - mag).max(0) as usize, x);
        if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s }
    } else {
        let s = format!("{x:.5e}");
        let (m, e) = s.split_once('e').expect("exponent form");
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{e}")
    }
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `cfg.trials` paired trials per axis value. Trials execute in
/// parallel; results are merged in trial order.
pub fn run_sweep(cfg: &ScenarioConfig, axis: Axis, values: &[f64], schemes: &[Scheme]) -> Result<SweepResult, HarnessError> {
    if axis == Axis::Iterations {
        return run_iterations(cfg, schemes);
    }
    let mut rows = Vec::new();
    let mut elapsed = Vec::new();
    for &value in values {
        let start = Instant::now();
        let point = axis.apply(cfg, value)?;
        let outcomes: Vec<Vec<TrialOutcome>> =
            (0..point.trials).into_par_iter().map(|t| run_paired_trial(&point, schemes, t)).collect::<Result<_, _>>()?;
        for (i, &scheme) in schemes.iter().enumerate() {
            let rates: Vec<f64> = outcomes.iter().map(|o| o[i].rate_bits).collect();
            let objs: Vec<f64> = outcomes.iter().map(|o| o[i].objective_bits).collect();
            let (mean, se) = mean_stderr(&rates);
            rows.push(SweepRow {
                value,
                scheme,
                mean_rate_bits: mean,
                stderr: se,
                trials: rates.len(),
                objective_bits: mean_stderr(&objs).0,
                worst_slack: outcomes.iter().map(|o| o[i].report.feasibility.worst()).fold(f64::INFINITY, f64::min),
            });
        }
        elapsed.push(start.elapsed());
    }
    Ok(SweepResult { axis, values: values.to_vec(), seed: cfg.seed, rows, elapsed })
}

/// Per-iteration objective trace of trial 0.
fn run_iterations(cfg: &ScenarioConfig, schemes: &[Scheme]) -> Result<SweepResult, HarnessError> {
    let start = Instant::now();
    let outcomes = run_paired_trial(cfg, schemes, 0)?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (o, &scheme) in outcomes.iter().zip(schemes) {
        for (r, v) in o.report.objective_bits().into_iter().enumerate() {
            let value = (r + 1) as f64;
            if !values.contains(&value) {
                values.push(value);
            }
            rows.push(SweepRow {
                value,
                scheme,
                mean_rate_bits: v,
                stderr: 0.0,
                trials: 1,
                objective_bits: v,
                worst_slack: o.report.feasibility.worst(),
            });
        }
    }
    Ok(SweepResult { axis: Axis::Iterations, values, seed: cfg.seed, rows, elapsed: vec![start.elapsed()] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        for (x, s) in [
            (0.0, "0"),
            (1.0, "1"),
            (7.4380123, "7.43801"),
            (-0.000123456789, "-0.000123457"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e6"),
            (0.05, "0.05"),
            (2.2, "2.2"),
            (3.1e-9, "3.1e-9"),
        ] {
            assert_eq!(sig6(x), s, "{x}");
        }
    }

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // Sample variance 5/3, divided by n = 4.
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn axis_parsing_and_application() {
        assert_eq!("M".parse::<Axis>().unwrap(), Axis::M);
        assert_eq!("P_MAX_DBM".parse::<Axis>().unwrap(), Axis::PMaxDbm);
        assert!(matches!("gain".parse::<Axis>(), Err(HarnessError::UnknownAxis(_))));
        let base = ScenarioConfig::desk();
        let c = Axis::AlphaR.apply(&base, 2.4).unwrap();
        assert_eq!((c.alpha_br, c.alpha_ru, c.alpha_bu), (2.4, 2.4, base.alpha_bu));
        assert!(Axis::M.apply(&base, 2.5).is_err());
        assert!(Axis::B.apply(&base, 0.0).is_err());
    }
}
