//! Second-stage beamforming for fixed reflection, time split and first-stage
//! beams. All K beams are stacked into one vector so the RIS power constraint
//! becomes a single quadratic form.

use super::aux::stage2_channels;
use super::beams::{beam_objective, beam_terms, BeamLagrangian};
use super::OptimizerError;
use crate::channel::ChannelSet;
use crate::numerics::{solve_concave_qcqp, CMatrix, CVector, NumericsError, QcqpOptions, QcqpProblem};
use crate::system::{harvested_energy, PowerModel, SolverState};

/// Budget `P_E` on `Σ_k ‖Θ G w2,k‖²` left after circuit power and amplified
/// noise, or `None` when the second stage has zero duration.
pub fn amplified_signal_budget(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> Option<f64> {
    let rest = 1.0 - state.tau;
    if rest <= 0.0 {
        return None;
    }
    let e_r = harvested_energy(&state.w1, state.tau, &cs.g_br, pm.eta1);
    let noise = pm.xi * pm.sigma_r_sq * state.theta.norm_squared();
    Some((e_r - rest * (pm.static_power(cs.dims.m) + noise)) / (rest * pm.xi))
}

/// Stacked problem `max Re{y^H w} − w^H Y w` s.t. `‖w‖² ≤ P_max`,
/// `w^H S w ≤ P_E`.
pub fn assemble_w2(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> Result<QcqpProblem, OptimizerError> {
    let (n, k) = (cs.dims.n, cs.dims.k);
    let h = stage2_channels(&state.theta, cs);
    let (a, b) = beam_terms(&h, &state.omega2, &state.nu2);
    let y = CVector::from_iterator(n * k, b.iter().flat_map(|v| v.iter().copied()));
    let mut big = CMatrix::zeros(n * k, n * k);
    let reflected = cs.g_br.adjoint() * CMatrix::from_diagonal(&state.theta.map(|t| t.conj() * t)) * &cs.g_br;
    let mut s = CMatrix::zeros(n * k, n * k);
    for j in 0..k {
        big.view_mut((j * n, j * n), (n, n)).copy_from(&a);
        s.view_mut((j * n, j * n), (n, n)).copy_from(&reflected);
    }
    let mut p = QcqpProblem::new(y, big).with_constraint(CMatrix::identity(n * k, n * k), pm.p_max);
    if let Some(budget) = amplified_signal_budget(state, cs, pm) {
        if reflected.norm() > 0.0 {
            if budget < 0.0 {
                return Err(OptimizerError::EnergyInfeasible { iteration: 0, budget });
            }
            p = p.with_constraint(s, budget);
        }
    }
    Ok(p)
}

fn unstack(x: &CVector, k: usize, n: usize) -> Vec<CVector> {
    (0..k).map(|j| x.rows(j * n, n).into_owned()).collect()
}

/// Second-stage beams for the active RIS, subject to the energy budget.
pub fn solve_w2(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> Result<Vec<CVector>, OptimizerError> {
    let p = assemble_w2(state, cs, pm)?;
    let x = match solve_concave_qcqp(&p, &QcqpOptions::default()) {
        Ok(s) => s.x,
        Err(NumericsError::MaxIterExceeded { partial, .. }) => partial.x,
        Err(e) => return Err(e.into()),
    };
    let (k, n) = (cs.dims.k, cs.dims.n);
    let current = CVector::from_iterator(n * k, state.w2.iter().flat_map(|v| v.iter().copied()));
    if p.objective(&x) >= p.objective(&current) || p.max_violation(&current) > 1e-9 {
        Ok(unstack(&x, k, n))
    } else {
        Ok(state.w2.clone())
    }
}

/// Second-stage beams without an energy constraint (passive RIS or no RIS).
pub fn solve_w2_unconstrained(state: &SolverState, cs: &ChannelSet, pm: &PowerModel) -> Result<Vec<CVector>, OptimizerError> {
    let h = stage2_channels(&state.theta, cs);
    let (a, b) = beam_terms(&h, &state.omega2, &state.nu2);
    let s = BeamLagrangian::new(&a, &b, None, pm.p_max).solve()?;
    if beam_objective(&a, &b, &s.w) >= beam_objective(&a, &b, &state.w2) {
        Ok(s.w)
    } else {
        Ok(state.w2.clone())
    }
}
