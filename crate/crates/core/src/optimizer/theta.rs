//! Reflection-coefficient subproblem: a concave quadratic in `θ` with
//! per-element amplitude caps and (active RIS) a diagonal power constraint.

use num_complex::Complex64;

use super::stats::SaaStats;
use super::OptimizerError;
use crate::channel::ChannelSet;
use crate::numerics::{solve_concave_qcqp, CMatrix, CVector, NumericsError, QcqpOptions, QcqpProblem};
use crate::system::{harvested_energy, PowerModel, SolverState};

/// `maximize Re{λ^H θ} − θ^H Γ θ` plus, for the active RIS,
/// `Σ_m v_m |θ_m|² ≤ budget`.
#[derive(Debug, Clone)]
pub struct ThetaProblem {
    pub linear: CVector,
    pub quad: CMatrix,
    pub weights: Vec<f64>,
    pub budget: Option<f64>,
}

impl ThetaProblem {
    pub fn objective(&self, theta: &CVector) -> f64 {
        self.linear.dotc(theta).re - theta.dotc(&(&self.quad * theta)).re
    }
}

pub fn assemble_theta(state: &SolverState, cs: &ChannelSet, stats: &SaaStats, pm: &PowerModel) -> ThetaProblem {
    let (m, k_count) = (cs.dims.m, cs.dims.k);
    let mu: Vec<CVector> = state.w2.iter().map(|w| &cs.g_br * w).collect();
    let mut linear = CVector::zeros(m);
    let mut quad = CMatrix::zeros(m, m);
    for k in 0..k_count {
        let h = &cs.h_ru[k];
        let nu = state.nu2[k];
        let wt = nu.norm_sqr();
        for (j, mu_j) in mu.iter().enumerate() {
            // conj(a_kj) with a_kj = conj(h_RU,k) ⊙ μ_j.
            let ac = h.component_mul(&mu_j.map(|z| z.conj()));
            let e = cs.h_bu[k].dotc(&state.w2[j]);
            if j == k {
                linear += &ac * (nu * 2.0 * (1.0 + state.omega2[k]).sqrt());
            }
            linear -= &ac * (e * 2.0 * wt);
            quad += (&ac * ac.adjoint()).scale(wt);
        }
        for q in 0..stats.dt.len() {
            linear -= h.component_mul(&stats.dt[q][k].map(|z| z.conj())).scale(2.0 * wt);
            quad += stats.m_bar[q][k].scale(wt);
        }
        for i in 0..m {
            quad[(i, i)] += Complex64::new(wt * pm.sigma_r_sq * h[i].norm_sqr(), 0.0);
        }
    }
    let weights = (0..m).map(|i| mu.iter().map(|v| v[i].norm_sqr()).sum::<f64>() + pm.sigma_r_sq).collect();
    let rest = 1.0 - state.tau;
    let budget = (rest > 0.0).then(|| {
        let e_r = harvested_energy(&state.w1, state.tau, &cs.g_br, pm.eta1);
        (e_r - rest * pm.static_power(m)) / (rest * pm.xi)
    });
    ThetaProblem { linear, quad, weights, budget }
}

fn qcqp_of(p: &ThetaProblem, caps: f64, with_budget: bool) -> QcqpProblem {
    let m = p.linear.len();
    let mut q = QcqpProblem::new(p.linear.clone(), p.quad.clone()).with_caps(vec![caps; m]);
    if with_budget {
        if let Some(b) = p.budget {
            let v = CMatrix::from_diagonal(&CVector::from_iterator(m, p.weights.iter().map(|&w| Complex64::new(w, 0.0))));
            q = q.with_constraint(v, b);
        }
    }
    q
}

fn run(q: &QcqpProblem, opts: &QcqpOptions) -> Result<CVector, OptimizerError> {
    match solve_concave_qcqp(q, opts) {
        Ok(s) => Ok(s.x),
        Err(NumericsError::MaxIterExceeded { partial, .. }) => Ok(partial.x),
        Err(e) => Err(e.into()),
    }
}

/// Active RIS: amplitudes up to `A_max` under the RIS power budget.
pub fn solve_theta(state: &SolverState, cs: &ChannelSet, stats: &SaaStats, pm: &PowerModel) -> Result<CVector, OptimizerError> {
    if cs.dims.m == 0 {
        return Ok(state.theta.clone());
    }
    let p = assemble_theta(state, cs, stats, pm);
    if let Some(b) = p.budget {
        if b < 0.0 {
            return Err(OptimizerError::EnergyInfeasible { iteration: 0, budget: b });
        }
    }
    let q = qcqp_of(&p, pm.a_max, true);
    let x = run(&q, &QcqpOptions::default())?;
    if p.objective(&x) >= p.objective(&state.theta) || q.max_violation(&state.theta) > 1e-9 {
        Ok(x)
    } else {
        Ok(state.theta.clone())
    }
}

/// Sweeps of exact per-element phase maximization at unit modulus.
pub fn phase_ascent(p: &ThetaProblem, theta: &mut CVector, sweeps: usize) {
    let m = theta.len();
    for _ in 0..sweeps {
        for i in 0..m {
            let mut g = p.linear[i];
            for j in 0..m {
                if j != i {
                    g -= p.quad[(i, j)] * theta[j] * 2.0;
                }
            }
            if g.norm() > 0.0 {
                theta[i] = g / g.norm();
            }
        }
    }
}

pub const PHASE_SWEEPS: usize = 20;

/// The relaxation only seeds the phase ascent, so a short run suffices.
const RELAXATION_ITERS: usize = 500;

/// Passive RIS: unit-modulus phases. Starts from the better of the current
/// phases and the normalized convex relaxation, then refines phase by phase.
pub fn solve_theta_passive(state: &SolverState, cs: &ChannelSet, stats: &SaaStats, pm: &PowerModel) -> Result<CVector, OptimizerError> {
    if cs.dims.m == 0 {
        return Ok(state.theta.clone());
    }
    let p = assemble_theta(state, cs, stats, pm);
    let relaxed = run(&qcqp_of(&p, 1.0, false), &QcqpOptions { max_iter: RELAXATION_ITERS, ..QcqpOptions::default() })?;
    let unit = relaxed.map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) });
    let mut theta = if p.objective(&unit) >= p.objective(&state.theta) { unit } else { state.theta.clone() };
    phase_ascent(&p, &mut theta, PHASE_SWEEPS);
    Ok(theta)
}
