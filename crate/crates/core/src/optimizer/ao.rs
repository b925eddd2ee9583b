//! Stochastic successive convex approximation with alternating optimization:
//! one fresh channel realization per outer iteration, running sample means,
//! and one pass over every block.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use super::aux::{update_aux_stage1, update_aux_stage2};
use super::beams::{solve_w1, update_tau, ScaOptions};
use super::stats::{update_saa_stats, SaaStats};
use super::theta::{solve_theta, solve_theta_passive};
use super::w2::{solve_w2, solve_w2_unconstrained};
use super::OptimizerError;
use crate::channel::{sample_uncertain_realization, ChannelSet, Realization};
use crate::config::ScenarioConfig;
use crate::numerics::CVector;
use crate::system::{check_feasibility, harvested_energy, ris_power, sum_rate_nats, FeasibilityReport, PowerModel, SolverState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Self-sustainable active RIS with time-division energy harvesting.
    Active,
    /// Unit-modulus passive RIS; no harvesting stage.
    Passive,
    /// Base station only.
    NoRis,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Active, Scheme::Passive, Scheme::NoRis];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Active => "active",
            Scheme::Passive => "passive",
            Scheme::NoRis => "no-ris",
        }
    }

    /// The power model seen by this scheme; a passive surface adds no
    /// amplifier noise.
    pub fn power_model(self, pm: &PowerModel) -> PowerModel {
        match self {
            Scheme::Active => *pm,
            Scheme::Passive | Scheme::NoRis => PowerModel { sigma_r_sq: 0.0, a_max: 1.0, ..*pm },
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "active" => Ok(Scheme::Active),
            "passive" => Ok(Scheme::Passive),
            "no-ris" | "noris" | "none" => Ok(Scheme::NoRis),
            other => Err(format!("unknown scheme '{other}' (expected active, passive or no-ris)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AoOptions {
    pub r_max: usize,
    pub tol: f64,
    pub sca: ScaOptions,
    pub e_mse: f64,
}

impl AoOptions {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self { r_max: cfg.r_max, tol: cfg.tol_outer, sca: ScaOptions { max_iter: cfg.i_max, tol: cfg.tol_sca }, e_mse: cfg.e_mse }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub tau: Duration,
    pub w1: Duration,
    pub w2: Duration,
    pub theta: Duration,
    pub other: Duration,
}

#[derive(Debug, Clone)]
pub struct AoReport {
    pub scheme: Scheme,
    pub state: SolverState,
    /// Sample-average rate (nats) over the realizations drawn so far,
    /// evaluated at the start of each outer iteration.
    pub objective: Vec<f64>,
    /// Sample-average rate (nats) of the returned state over every
    /// realization drawn.
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative energy slack right after each time-split update.
    pub tau_slack: Vec<f64>,
    pub w1_iterations: Vec<usize>,
    pub feasibility: FeasibilityReport,
    pub timings: Timings,
}

impl AoReport {
    pub fn objective_bits(&self) -> Vec<f64> {
        self.objective.iter().map(|v| v / std::f64::consts::LN_2).collect()
    }
}

/// Matched-filter beams and (for the RIS schemes) phases that align the
/// cascaded path of UE 0 with its direct path.
pub fn initial_state(cs: &ChannelSet, pm: &PowerModel, scheme: Scheme) -> Result<SolverState, OptimizerError> {
    let d = cs.dims;
    let per = (pm.p_max / d.k as f64).sqrt();
    let w: Vec<CVector> = cs
        .h_bu
        .iter()
        .map(|h| {
            let n = h.norm();
            if n > 0.0 { h.scale(per / n) } else { CVector::from_element(d.n, Complex64::new(per / (d.n as f64).sqrt(), 0.0)) }
        })
        .collect();
    let theta = match scheme {
        Scheme::NoRis => CVector::zeros(d.m),
        Scheme::Active | Scheme::Passive => {
            let amp = if scheme == Scheme::Active { pm.a_max.min(1.0) } else { 1.0 };
            let direct = cs.h_bu[0].dotc(&w[0]).arg();
            let gw = &cs.g_br * &w[0];
            CVector::from_fn(d.m, |i, _| Complex64::from_polar(amp, direct - (cs.h_ru[0][i].conj() * gw[i]).arg()))
        }
    };
    let tau = match scheme {
        Scheme::Active if d.m > 0 => update_tau(ris_power(&w, &theta, &cs.g_br, pm, d.m), &w, &cs.g_br, pm.eta1)?,
        _ => 0.0,
    };
    Ok(SolverState::new(tau, w.clone(), w, theta))
}

/// Sample-average rate of `state` for `scheme`, in nats.
pub fn scheme_rate(scheme: Scheme, state: &SolverState, reals: &[Realization], cs: &ChannelSet, pm: &PowerModel) -> f64 {
    let pm = scheme.power_model(pm);
    sum_rate_nats(state.tau, &state.w1, &state.w2, &state.theta, reals, cs, &pm)
}

fn energy_slack_rel(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> f64 {
    let e_r = harvested_energy(&state.w1, state.tau, &cs.g_br, pm.eta1);
    let need = (1.0 - state.tau) * ris_power(&state.w2, &state.theta, &cs.g_br, pm, cs.dims.m);
    let scale = e_r.abs().max(need.abs());
    if scale > 0.0 { (e_r - need) / scale } else { 0.0 }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    *slot += t.elapsed();
    out
}

/// Runs the outer loop until the relative objective change drops below the
/// tolerance or the realization budget is spent.
pub fn ssca_ao<R: Rng + ?Sized>(
    cs: &ChannelSet,
    cfg: &ScenarioConfig,
    scheme: Scheme,
    opts: &AoOptions,
    rng: &mut R,
) -> Result<AoReport, OptimizerError> {
    let base = PowerModel::from_config(cfg);
    let pm = scheme.power_model(&base);
    let mut state = initial_state(cs, &pm, scheme)?;
    let mut stats = SaaStats::new(cs.dims);
    let mut reals: Vec<Realization> = Vec::with_capacity(opts.r_max);
    let mut timings = Timings::default();
    let mut objective = Vec::with_capacity(opts.r_max);
    let mut tau_slack = Vec::new();
    let mut w1_iterations = Vec::new();
    let mut converged = false;

    for r in 1..=opts.r_max.max(1) {
        let at = |e: OptimizerError| match e {
            OptimizerError::EnergyInfeasible { budget, .. } => OptimizerError::EnergyInfeasible { iteration: r, budget },
            other => other,
        };
        timed(&mut timings.other, || {
            let real = sample_uncertain_realization(cs, opts.e_mse, cfg, r, rng);
            update_saa_stats(&mut stats, &real, cs);
            reals.push(real);
            objective.push(scheme_rate(scheme, &state, &reals, cs, &base));
        });
        state.r = r;

        // Without elements there is nothing to power and no harvesting stage.
        if scheme == Scheme::Active && cs.dims.m > 0 {
            state.tau = timed(&mut timings.tau, || {
                update_tau(ris_power(&state.w2, &state.theta, &cs.g_br, &pm, cs.dims.m), &state.w1, &cs.g_br, pm.eta1)
            })
            .map_err(at)?;
            tau_slack.push(energy_slack_rel(&state, cs, &pm));
            (state.omega1, state.nu1) = update_aux_stage1(&state.w1, cs, &stats, &pm);
            let sol = timed(&mut timings.w1, || solve_w1(&state, cs, &pm, opts.sca)).map_err(at)?;
            w1_iterations.push(sol.iterations);
            state.w1 = sol.w1;
        }

        (state.omega2, state.nu2) = update_aux_stage2(&state.w2, &state.theta, cs, &stats, &pm);
        state.w2 = timed(&mut timings.w2, || match scheme {
            Scheme::Active => solve_w2(&state, cs, &pm),
            _ => solve_w2_unconstrained(&state, cs, &pm),
        })
        .map_err(at)?;

        if scheme != Scheme::NoRis {
            (state.omega2, state.nu2) = update_aux_stage2(&state.w2, &state.theta, cs, &stats, &pm);
            state.theta = timed(&mut timings.theta, || match scheme {
                Scheme::Active => solve_theta(&state, cs, &stats, &pm),
                _ => solve_theta_passive(&state, cs, &stats, &pm),
            })
            .map_err(at)?;
        }

        if let [.., prev, last] = objective[..] {
            if (last - prev).abs() <= opts.tol * last.abs() {
                converged = true;
                break;
            }
        }
    }

    let final_objective = scheme_rate(scheme, &state, &reals, cs, &base);
    let mut feasibility = check_feasibility(&state, cs, &pm);
    if scheme != Scheme::Active {
        feasibility.energy_slack = f64::INFINITY;
    }
    Ok(AoReport {
        scheme,
        iterations: objective.len(),
        state,
        objective,
        final_objective,
        converged,
        tau_slack,
        w1_iterations,
        feasibility,
        timings,
    })
}
