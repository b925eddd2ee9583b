//! Quadratic-transform auxiliaries `(ω, ν)` and the matching surrogates.
//!
//! For channels `h_k`, beams `w` and per-UE disturbance `z_k` (mean jamming,
//! interference and noise), the surrogate is
//!
//! ```text
//! f = Σ_k 2√(1+ω_k) Re{ν_k* h_k^H w_k} − |ν_k|² (Σ_j |h_k^H w_j|² + z_k)
//!     + Σ_k ln(1+ω_k) − ω_k
//! ```
//!
//! Its maximizer over `(ω, ν)` gives `f = Σ_k ln(1 + SINR_k)`.

use num_complex::Complex64;

use super::stats::SaaStats;
use crate::channel::ChannelSet;
use crate::numerics::CVector;
use crate::system::{effective_channel, ris_noise_at, PowerModel};

pub(crate) fn optimal_aux(h: &[CVector], w: &[CVector], z: &[f64]) -> (Vec<f64>, Vec<Complex64>) {
    let mut omega = Vec::with_capacity(h.len());
    let mut nu = Vec::with_capacity(h.len());
    for (k, hk) in h.iter().enumerate() {
        let gains: Vec<Complex64> = w.iter().map(|wj| hk.dotc(wj)).collect();
        let total: f64 = gains.iter().map(|g| g.norm_sqr()).sum::<f64>() + z[k];
        let signal = gains[k].norm_sqr();
        let om = signal / (total - signal);
        omega.push(om);
        nu.push(gains[k] * (1.0 + om).sqrt() / total);
    }
    (omega, nu)
}

pub(crate) fn surrogate(h: &[CVector], w: &[CVector], z: &[f64], omega: &[f64], nu: &[Complex64]) -> f64 {
    h.iter()
        .enumerate()
        .map(|(k, hk)| {
            let gains: Vec<Complex64> = w.iter().map(|wj| hk.dotc(wj)).collect();
            let total: f64 = gains.iter().map(|g| g.norm_sqr()).sum::<f64>() + z[k];
            2.0 * (1.0 + omega[k]).sqrt() * (nu[k].conj() * gains[k]).re - nu[k].norm_sqr() * total + omega[k].ln_1p()
                - omega[k]
        })
        .sum()
}

/// Mean first-stage disturbance per UE.
pub(crate) fn stage1_disturbance(stats: &SaaStats, pm: &PowerModel) -> Vec<f64> {
    stats.z1.iter().map(|z| z + pm.sigma1_sq).collect()
}

/// Mean second-stage disturbance per UE at reflection `theta`.
pub(crate) fn stage2_disturbance(theta: &CVector, cs: &ChannelSet, stats: &SaaStats, pm: &PowerModel) -> Vec<f64> {
    (0..cs.dims.k)
        .map(|k| stats.z2(k, theta, cs) + ris_noise_at(k, theta, cs, pm.sigma_r_sq) + pm.sigma2_sq)
        .collect()
}

pub(crate) fn stage2_channels(theta: &CVector, cs: &ChannelSet) -> Vec<CVector> {
    (0..cs.dims.k).map(|k| effective_channel(k, theta, cs)).collect()
}

pub fn update_aux_stage1(w1: &[CVector], cs: &ChannelSet, stats: &SaaStats, pm: &PowerModel) -> (Vec<f64>, Vec<Complex64>) {
    optimal_aux(&cs.h_bu, w1, &stage1_disturbance(stats, pm))
}

pub fn update_aux_stage2(
    w2: &[CVector],
    theta: &CVector,
    cs: &ChannelSet,
    stats: &SaaStats,
    pm: &PowerModel,
) -> (Vec<f64>, Vec<Complex64>) {
    optimal_aux(&stage2_channels(theta, cs), w2, &stage2_disturbance(theta, cs, stats, pm))
}

pub fn surrogate_stage1(
    w1: &[CVector],
    omega: &[f64],
    nu: &[Complex64],
    cs: &ChannelSet,
    stats: &SaaStats,
    pm: &PowerModel,
) -> f64 {
    surrogate(&cs.h_bu, w1, &stage1_disturbance(stats, pm), omega, nu)
}

pub fn surrogate_stage2(
    w2: &[CVector],
    theta: &CVector,
    omega: &[f64],
    nu: &[Complex64],
    cs: &ChannelSet,
    stats: &SaaStats,
    pm: &PowerModel,
) -> f64 {
    surrogate(&stage2_channels(theta, cs), w2, &stage2_disturbance(theta, cs, stats, pm), omega, nu)
}

/// `Σ_k ln(1 + SINR_k)` evaluated with the mean disturbance (the surrogate's
/// value at the optimal auxiliaries).
#[cfg(test)]
pub(crate) fn log_sum(h: &[CVector], w: &[CVector], z: &[f64]) -> f64 {
    h.iter()
        .enumerate()
        .map(|(k, hk)| {
            let p: Vec<f64> = w.iter().map(|wj| hk.dotc(wj).norm_sqr()).collect();
            let total: f64 = p.iter().sum::<f64>() + z[k];
            (p[k] / (total - p[k])).ln_1p()
        })
        .sum()
}
