//! Two-stage TD-SWIPT system model: SINRs, rates, harvested energy, RIS power
//! draw and constraint checks. Rates are in nats unless a name says bits.

use num_complex::Complex64;

use crate::channel::{ChannelSet, Realization};
use crate::config::ScenarioConfig;
use crate::numerics::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub p_max: f64,
    pub eta1: f64,
    pub xi: f64,
    pub p_dc: f64,
    pub p_sc: f64,
    pub a_max: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub sigma_r_sq: f64,
}

impl PowerModel {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            p_max: cfg.p_max(),
            eta1: cfg.eta1,
            xi: cfg.xi,
            p_dc: cfg.p_dc,
            p_sc: cfg.p_sc,
            a_max: cfg.a_max(),
            sigma1_sq: cfg.noise(),
            sigma2_sq: cfg.noise(),
            sigma_r_sq: cfg.ris_noise(),
        }
    }

    /// Circuit power of `m` elements, `M (P_dc + P_sc)`.
    pub fn static_power(&self, m: usize) -> f64 {
        m as f64 * (self.p_dc + self.p_sc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub tau: f64,
    pub w1: Vec<CVector>,
    pub w2: Vec<CVector>,
    pub theta: CVector,
    pub omega1: Vec<f64>,
    pub nu1: Vec<Complex64>,
    pub omega2: Vec<f64>,
    pub nu2: Vec<Complex64>,
    pub r: usize,
}

impl SolverState {
    pub fn new(tau: f64, w1: Vec<CVector>, w2: Vec<CVector>, theta: CVector) -> Self {
        let k = w1.len();
        Self {
            tau,
            w1,
            w2,
            theta,
            omega1: vec![0.0; k],
            nu1: vec![Complex64::new(0.0, 0.0); k],
            omega2: vec![0.0; k],
            nu2: vec![Complex64::new(0.0, 0.0); k],
            r: 0,
        }
    }
}

pub fn total_power(w: &[CVector]) -> f64 {
    w.iter().map(|v| v.norm_squared()).sum()
}

/// `Σ_k ‖G_BR w_k‖²`.
pub fn ris_incident_power(w: &[CVector], g_br: &CMatrix) -> f64 {
    w.iter().map(|v| (g_br * v).norm_squared()).sum()
}

/// Energy harvested at the RIS during the first stage.
pub fn harvested_energy(w1: &[CVector], tau: f64, g_br: &CMatrix, eta1: f64) -> f64 {
    tau * eta1 * ris_incident_power(w1, g_br)
}

/// Jamming plus interference power at UE `k` in the first stage.
pub fn stage1_interference(k: usize, real: &Realization) -> f64 {
    let jam: f64 = real.h_ju.iter().zip(&real.z_j).map(|(h, z)| h[k].dotc(&z[k]).norm_sqr()).sum();
    let int: f64 = real.h_iu.iter().zip(&real.z_i).map(|(h, z)| h[k].dotc(&z[k]).norm_sqr()).sum();
    jam + int
}

pub fn stage1_sinr(k: usize, w1: &[CVector], real: &Realization, cs: &ChannelSet, sigma1_sq: f64) -> f64 {
    let h = &cs.h_bu[k];
    let signal = h.dotc(&w1[k]).norm_sqr();
    let leak: f64 = w1.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, w)| h.dotc(w).norm_sqr()).sum();
    signal / (leak + stage1_interference(k, real) + sigma1_sq)
}

/// Effective second-stage channel `h_k` with `h_k^H w = h_BU,k^H w + h_RU,k^H Θ G_BR w`.
pub fn effective_channel(k: usize, theta: &CVector, cs: &ChannelSet) -> CVector {
    let mut h = cs.h_bu[k].clone();
    if !theta.is_empty() {
        let v = theta.map(|t| t.conj()).component_mul(&cs.h_ru[k]);
        h += cs.g_br.adjoint() * v;
    }
    h
}

/// Jamming (direct plus RIS-reflected) and interference power at UE `k` in
/// the second stage.
pub fn stage2_interference(k: usize, theta: &CVector, real: &Realization, cs: &ChannelSet) -> f64 {
    let mut total = 0.0;
    for ((h, g), z) in real.h_ju.iter().zip(&real.g_jr).zip(&real.z_j) {
        let mut s = h[k].dotc(&z[k]);
        if !theta.is_empty() {
            let t = g * &z[k];
            s += cs.h_ru[k].iter().zip(theta.iter()).zip(t.iter()).map(|((hr, th), tv)| hr.conj() * th * tv).sum::<Complex64>();
        }
        total += s.norm_sqr();
    }
    for (h, z) in real.h_iu.iter().zip(&real.z_i) {
        total += h[k].dotc(&z[k]).norm_sqr();
    }
    total
}

/// Amplified RIS noise reaching UE `k`, `σR² Σ_m |h_RU,k,m|² |θ_m|²`.
pub fn ris_noise_at(k: usize, theta: &CVector, cs: &ChannelSet, sigma_r_sq: f64) -> f64 {
    if theta.is_empty() {
        return 0.0;
    }
    sigma_r_sq * cs.h_ru[k].iter().zip(theta.iter()).map(|(h, t)| h.norm_sqr() * t.norm_sqr()).sum::<f64>()
}

pub fn stage2_sinr(k: usize, w2: &[CVector], theta: &CVector, real: &Realization, cs: &ChannelSet, pm: &PowerModel) -> f64 {
    let h = effective_channel(k, theta, cs);
    let signal = h.dotc(&w2[k]).norm_sqr();
    let leak: f64 = w2.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, w)| h.dotc(w).norm_sqr()).sum();
    let denom = leak + stage2_interference(k, theta, real, cs) + ris_noise_at(k, theta, cs, pm.sigma_r_sq) + pm.sigma2_sq;
    signal / denom
}

/// Per-realization rate in nats, `Σ_k τ ln(1+γ1) + (1−τ) ln(1+γ2)`.
pub fn realization_rate(
    tau: f64,
    w1: &[CVector],
    w2: &[CVector],
    theta: &CVector,
    real: &Realization,
    cs: &ChannelSet,
    pm: &PowerModel,
) -> f64 {
    (0..cs.dims.k)
        .map(|k| {
            let r1 = if tau > 0.0 { tau * stage1_sinr(k, w1, real, cs, pm.sigma1_sq).ln_1p() } else { 0.0 };
            let r2 = if tau < 1.0 { (1.0 - tau) * stage2_sinr(k, w2, theta, real, cs, pm).ln_1p() } else { 0.0 };
            r1 + r2
        })
        .sum()
}

/// Sample-average rate over `reals`, in nats.
pub fn sum_rate_nats(
    tau: f64,
    w1: &[CVector],
    w2: &[CVector],
    theta: &CVector,
    reals: &[Realization],
    cs: &ChannelSet,
    pm: &PowerModel,
) -> f64 {
    assert!(!reals.is_empty(), "sum_rate needs at least one realization");
    reals.iter().map(|r| realization_rate(tau, w1, w2, theta, r, cs, pm)).sum::<f64>() / reals.len() as f64
}

/// Sample-average rate over `reals`, in bits per channel use.
pub fn sum_rate(
    tau: f64,
    w1: &[CVector],
    w2: &[CVector],
    theta: &CVector,
    reals: &[Realization],
    cs: &ChannelSet,
    pm: &PowerModel,
) -> f64 {
    sum_rate_nats(tau, w1, w2, theta, reals, cs, pm) / std::f64::consts::LN_2
}

/// Power drawn by the active RIS while reflecting.
pub fn ris_power(w2: &[CVector], theta: &CVector, g_br: &CMatrix, pm: &PowerModel, m: usize) -> f64 {
    let amplified: f64 = w2
        .iter()
        .map(|w| (g_br * w).component_mul(theta).norm_squared())
        .sum();
    let noise = pm.sigma_r_sq * theta.norm_squared();
    pm.xi * (amplified + noise) + pm.static_power(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// `P_max − Σ‖w1,k‖²`.
    pub power1_slack: f64,
    pub power2_slack: f64,
    /// `E_R − (1−τ) P_R`.
    pub energy_slack: f64,
    /// `min_m (A_max − |θ_m|)`; `+∞` without elements.
    pub amplitude_slack: f64,
}

impl FeasibilityReport {
    pub fn power_ok(&self, tol: f64) -> bool {
        self.power1_slack >= -tol && self.power2_slack >= -tol
    }

    pub fn energy_ok(&self, tol: f64) -> bool {
        self.energy_slack >= -tol
    }

    pub fn amplitude_ok(&self, tol: f64) -> bool {
        self.amplitude_slack >= -tol
    }

    pub fn all_ok(&self, tol: f64) -> bool {
        self.power_ok(tol) && self.energy_ok(tol) && self.amplitude_ok(tol)
    }

    /// Smallest slack across every constraint.
    pub fn worst(&self) -> f64 {
        self.power1_slack.min(self.power2_slack).min(self.energy_slack).min(self.amplitude_slack)
    }
}

pub fn check_feasibility(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> FeasibilityReport {
    let e_r = harvested_energy(&state.w1, state.tau, &cs.g_br, pm.eta1);
    let p_r = ris_power(&state.w2, &state.theta, &cs.g_br, pm, cs.dims.m);
    let amplitude_slack = state.theta.iter().map(|t| pm.a_max - t.norm()).fold(f64::INFINITY, f64::min);
    FeasibilityReport {
        power1_slack: pm.p_max - total_power(&state.w1),
        power2_slack: pm.p_max - total_power(&state.w2),
        energy_slack: e_r - (1.0 - state.tau) * p_r,
        amplitude_slack,
    }
}
