//! First-stage beamforming: the closed-form Lagrangian solution of
//!
//! ```text
//! maximize   Σ_j Re{b_j^H w_j} − Σ_j w_j^H A w_j
//! subject to Σ_j ‖w_j‖² ≤ P_max
//!            Σ_j 2 Re{c_j^H w_j} ≥ Ξ          (optional energy cut)
//! ```
//!
//! wrapped in successive convex approximation of the harvested-energy
//! constraint, plus the closed-form time split.

use num_complex::Complex64;

use super::OptimizerError;
use crate::channel::ChannelSet;
use crate::numerics::bisect::{feasible_edge, grow_until_feasible};
use crate::numerics::{CMatrix, CVector, HermEigen};
use crate::system::{ris_incident_power, ris_power, PowerModel, SolverState};

/// Eigenvalues below this fraction of the largest are treated as zero.
const NULL_REL: f64 = 1e-12;

/// Linearized energy constraint `Σ_j 2 Re{c_j^H w_j} ≥ xi`.
#[derive(Debug, Clone)]
pub struct EnergyCut {
    pub c: Vec<CVector>,
    pub xi: f64,
}

#[derive(Debug, Clone)]
pub struct BeamSolution {
    pub w: Vec<CVector>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Largest of the relative stationarity, complementary-slackness and
    /// primal-violation residuals.
    pub kkt_residual: f64,
}

/// The Lagrangian maximizer `w_j(λ1) = (A + λ1 I)^{-1}(b_j/2 + λ2*(λ1) c_j)`
/// in the eigenbasis of `A`.
pub struct BeamLagrangian {
    eig: HermEigen,
    a: CMatrix,
    half_b: Vec<CVector>,
    bh: Vec<CVector>,
    cut: Option<(Vec<CVector>, Vec<CVector>, f64)>,
    p_max: f64,
    singular: bool,
}

impl BeamLagrangian {
    pub fn new(a: &CMatrix, b: &[CVector], cut: Option<&EnergyCut>, p_max: f64) -> Self {
        let eig = HermEigen::new(a);
        let floor = NULL_REL * eig.max().max(0.0);
        let null: Vec<bool> = eig.values.iter().map(|&d| d <= floor).collect();
        let half_b: Vec<CVector> = b.iter().map(|v| v.scale(0.5)).collect();
        // b lies in the range of A; components along null directions are
        // rounding noise.
        let bh = half_b
            .iter()
            .map(|v| {
                let mut p = eig.project(v);
                for (i, &z) in null.iter().enumerate() {
                    if z {
                        p[i] = Complex64::new(0.0, 0.0);
                    }
                }
                p
            })
            .collect();
        let cut = cut.map(|e| (e.c.clone(), e.c.iter().map(|c| eig.project(c)).collect(), e.xi));
        Self { singular: null.iter().any(|&z| z), eig, a: a.clone(), half_b, bh, cut, p_max }
    }

    fn inv(&self, lambda1: f64) -> Vec<f64> {
        self.eig
            .values
            .iter()
            .map(|&d| {
                let s = d.max(0.0) + lambda1;
                if s > NULL_REL * self.eig.max().max(0.0) && s > 0.0 { 1.0 / s } else { 0.0 }
            })
            .collect()
    }

    /// Optimal energy multiplier at `lambda1`.
    pub fn lambda2(&self, lambda1: f64) -> f64 {
        let Some((_, ch, xi)) = &self.cut else { return 0.0 };
        let inv = self.inv(lambda1);
        let (mut cross, mut quad) = (0.0, 0.0);
        for (c, b) in ch.iter().zip(&self.bh) {
            for i in 0..inv.len() {
                cross += (c[i].conj() * b[i]).re * inv[i];
                quad += c[i].norm_sqr() * inv[i];
            }
        }
        if quad <= 0.0 {
            return 0.0;
        }
        ((xi - 2.0 * cross) / (2.0 * quad)).max(0.0)
    }

    fn coords(&self, lambda1: f64) -> (f64, Vec<CVector>) {
        let l2 = self.lambda2(lambda1);
        let inv = self.inv(lambda1);
        let coords = self
            .bh
            .iter()
            .enumerate()
            .map(|(j, b)| {
                CVector::from_fn(b.len(), |i, _| {
                    let mut v = b[i];
                    if let Some((_, ch, _)) = &self.cut {
                        v += ch[j][i] * l2;
                    }
                    v * inv[i]
                })
            })
            .collect();
        (l2, coords)
    }

    /// Transmit power of the Lagrangian maximizer at `lambda1`.
    pub fn power(&self, lambda1: f64) -> f64 {
        if lambda1 <= 0.0 && self.singular && self.cut.is_some() {
            return f64::INFINITY;
        }
        self.coords(lambda1).1.iter().map(|c| c.norm_squared()).sum()
    }

    pub fn beams(&self, lambda1: f64) -> (f64, Vec<CVector>) {
        let (l2, coords) = self.coords(lambda1);
        (l2, coords.iter().map(|c| self.eig.lift(c)).collect())
    }

    pub fn solve(&self) -> Result<BeamSolution, OptimizerError> {
        if let Some((c, _, xi)) = &self.cut {
            let cn: f64 = c.iter().map(|v| v.norm_squared()).sum();
            if *xi > 0.0 && (cn == 0.0 || xi * xi / (4.0 * cn) > self.p_max) {
                return Err(OptimizerError::EnergyInfeasible { iteration: 0, budget: -xi });
            }
        }
        let g = |l: f64| self.power(l) - self.p_max;
        let lambda1 = if g(0.0) <= 0.0 {
            0.0
        } else {
            let bnorm: f64 = self.half_b.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
            let start = 1e-14 * (self.eig.max().max(0.0) + bnorm / self.p_max.sqrt()).max(f64::MIN_POSITIVE);
            let hi = grow_until_feasible(g, start, 2000).ok_or(OptimizerError::EnergyInfeasible {
                iteration: 0,
                budget: self.p_max,
            })?;
            let lo = if hi > start { 0.5 * hi } else { 0.0 };
            feasible_edge(g, lo, hi, 1e-13, 300)
        };
        let (lambda2, w) = self.beams(lambda1);
        let kkt_residual = self.residual(&w, lambda1, lambda2);
        Ok(BeamSolution { w, lambda1, lambda2, kkt_residual })
    }

    fn residual(&self, w: &[CVector], lambda1: f64, lambda2: f64) -> f64 {
        let scale: f64 = self.half_b.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let mut stat = 0.0;
        for (j, wj) in w.iter().enumerate() {
            let mut r = &self.a * wj + wj.scale(lambda1) - &self.half_b[j];
            if let Some((c, _, _)) = &self.cut {
                r -= c[j].scale(lambda2);
            }
            stat += r.norm_squared();
        }
        let mut worst = stat.sqrt() / scale;
        let power: f64 = w.iter().map(|v| v.norm_squared()).sum();
        let p_gap = (power - self.p_max) / self.p_max;
        worst = worst.max(p_gap.max(0.0));
        if lambda1 > 0.0 {
            worst = worst.max(p_gap.abs());
        }
        if let Some((c, _, xi)) = &self.cut {
            let lhs: f64 = c.iter().zip(w).map(|(c, w)| 2.0 * c.dotc(w).re).sum();
            let e_gap = (lhs - xi) / xi.abs().max(lhs.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((-e_gap).max(0.0));
            if lambda2 > 0.0 {
                worst = worst.max(e_gap.abs());
            }
        }
        worst
    }
}

/// Quadratic and linear terms of the beamforming surrogate for channels `h`.
pub fn beam_terms(h: &[CVector], omega: &[f64], nu: &[Complex64]) -> (CMatrix, Vec<CVector>) {
    let n = h.first().map_or(0, |v| v.len());
    let mut a = CMatrix::zeros(n, n);
    for (hk, v) in h.iter().zip(nu) {
        a += (hk * hk.adjoint()).scale(v.norm_sqr());
    }
    let b = h.iter().zip(omega).zip(nu).map(|((hk, o), v)| hk * (*v * 2.0 * (1.0 + o).sqrt())).collect();
    (a, b)
}

pub fn beam_objective(a: &CMatrix, b: &[CVector], w: &[CVector]) -> f64 {
    b.iter().zip(w).map(|(b, w)| b.dotc(w).re - w.dotc(&(a * w)).re).sum()
}

/// `τ* = P_R / (P_R + η1 Σ‖G w1,k‖²)`, which makes the energy constraint tight.
pub fn update_tau(p_r: f64, w1: &[CVector], g_br: &CMatrix, eta1: f64) -> Result<f64, OptimizerError> {
    let harvest = eta1 * ris_incident_power(w1, g_br);
    let denom = p_r + harvest;
    if !(denom > 0.0) {
        return Err(OptimizerError::DegenerateTau);
    }
    Ok(p_r / denom)
}

#[derive(Debug, Clone, Copy)]
pub struct ScaOptions {
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct W1Solution {
    pub w1: Vec<CVector>,
    pub iterations: usize,
    /// Surrogate objective after each SCA step.
    pub trace: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub kkt_residual: f64,
}

/// Optimizes the first-stage beams for the state's auxiliaries, time split and
/// second-stage RIS power draw.
pub fn solve_w1(state: &SolverState, cs: &ChannelSet, pm: &PowerModel, opts: ScaOptions) -> Result<W1Solution, OptimizerError> {
    let (a, b) = beam_terms(&cs.h_bu, &state.omega1, &state.nu1);
    let k1 = cs.g_br.adjoint() * &cs.g_br;
    let p_r = ris_power(&state.w2, &state.theta, &cs.g_br, pm, cs.dims.m);
    let gain = state.tau * pm.eta1;
    let needs_cut = state.tau < 1.0 && p_r > 0.0;

    let mut w = state.w1.clone();
    let mut last = beam_objective(&a, &b, &w);
    let mut trace = Vec::new();
    let mut sol = None;
    for _ in 0..opts.max_iter.max(1) {
        let cut = needs_cut.then(|| {
            let c: Vec<CVector> = w.iter().map(|v| (&k1 * v).scale(gain)).collect();
            let xi = (1.0 - state.tau) * p_r + c.iter().zip(&w).map(|(c, v)| v.dotc(c).re).sum::<f64>();
            EnergyCut { c, xi }
        });
        let s = BeamLagrangian::new(&a, &b, cut.as_ref(), pm.p_max).solve()?;
        let f = beam_objective(&a, &b, &s.w);
        trace.push(f);
        w = s.w.clone();
        sol = Some(s);
        let done = (f - last).abs() <= opts.tol * f.abs().max(f64::MIN_POSITIVE);
        last = f;
        if done {
            break;
        }
    }
    let s = sol.expect("at least one SCA step");
    Ok(W1Solution { w1: w, iterations: trace.len(), trace, lambda1: s.lambda1, lambda2: s.lambda2, kkt_residual: s.kkt_residual })
}
