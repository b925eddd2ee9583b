//! Running means of the realization-dependent quantities the surrogates need,
//! so no subproblem ever loops over stored realizations.

use num_complex::Complex64;

use crate::channel::{ChannelSet, Dims, Realization};
use crate::numerics::{CMatrix, CVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SaaStats {
    pub count: usize,
    /// Mean first-stage jamming plus interference power, per UE.
    pub z1: Vec<f64>,
    /// Mean interference power (interferers only), per UE.
    pub zi: Vec<f64>,
    /// Mean `|d_qk|²` with `d_qk = h_JU,qk^H z_J,qk`, indexed `[q][k]`.
    pub d_sq: Vec<Vec<f64>>,
    /// Mean `conj(d_qk) t_qk` with `t_qk = G_JR,q z_J,qk`.
    pub dt: Vec<Vec<CVector>>,
    /// Mean `diag(t*) h_RU,k h_RU,k^H diag(t)`.
    pub m_bar: Vec<Vec<CMatrix>>,
}

impl SaaStats {
    pub fn new(d: Dims) -> Self {
        Self {
            count: 0,
            z1: vec![0.0; d.k],
            zi: vec![0.0; d.k],
            d_sq: vec![vec![0.0; d.k]; d.q],
            dt: vec![vec![CVector::zeros(d.m); d.k]; d.q],
            m_bar: vec![vec![CMatrix::zeros(d.m, d.m); d.k]; d.q],
        }
    }

    /// Mean second-stage jamming plus interference power at UE `k` for
    /// reflection vector `theta`.
    pub fn z2(&self, k: usize, theta: &CVector, cs: &ChannelSet) -> f64 {
        let mut total = self.zi[k];
        for q in 0..self.d_sq.len() {
            total += self.d_sq[q][k];
            if !theta.is_empty() {
                // a_m = conj(h_RU,k,m) t_m, so E[conj(d) a^T θ] = Σ_m conj(h_m) θ_m E[conj(d) t_m].
                let cross: Complex64 = cs.h_ru[k]
                    .iter()
                    .zip(theta.iter())
                    .zip(self.dt[q][k].iter())
                    .map(|((h, t), dt)| h.conj() * t * dt)
                    .sum();
                total += 2.0 * cross.re + theta.dotc(&(&self.m_bar[q][k] * theta)).re;
            }
        }
        total
    }
}

/// Folds realization `real` into the running means.
pub fn update_saa_stats(stats: &mut SaaStats, real: &Realization, cs: &ChannelSet) {
    let n = stats.count as f64 + 1.0;
    let step = |mean: &mut f64, sample: f64| *mean += (sample - *mean) / n;
    let k_count = stats.z1.len();
    for k in 0..k_count {
        let mut jam = 0.0;
        for q in 0..stats.d_sq.len() {
            let z = &real.z_j[q][k];
            let d = real.h_ju[q][k].dotc(z);
            jam += d.norm_sqr();
            step(&mut stats.d_sq[q][k], d.norm_sqr());
            let m = stats.dt[q][k].len();
            if m > 0 {
                let t = &real.g_jr[q] * z;
                let sample = t.map(|v| d.conj() * v);
                let mean = &mut stats.dt[q][k];
                *mean += (sample - &*mean).unscale(n);
                // v = conj(t) ⊙ h_RU,k gives v v^H = diag(t*) h h^H diag(t).
                let v = t.map(|x| x.conj()).component_mul(&cs.h_ru[k]);
                let outer = &v * v.adjoint();
                let mb = &mut stats.m_bar[q][k];
                *mb += (outer - &*mb).unscale(n);
            }
        }
        let int: f64 = real.h_iu.iter().zip(&real.z_i).map(|(h, z)| h[k].dotc(&z[k]).norm_sqr()).sum();
        step(&mut stats.zi[k], int);
        step(&mut stats.z1[k], jam + int);
    }
    stats.count += 1;
}
