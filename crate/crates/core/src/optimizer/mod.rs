//! Sum-rate maximization over beams, reflection coefficients and time split.

mod ao;
mod aux;
mod beams;
mod stats;
mod theta;
mod w2;

pub use ao::{initial_state, scheme_rate, ssca_ao, AoOptions, AoReport, Scheme, Timings};
pub use aux::{surrogate_stage1, surrogate_stage2, update_aux_stage1, update_aux_stage2};
pub use beams::{beam_objective, beam_terms, solve_w1, update_tau, BeamLagrangian, BeamSolution, EnergyCut, ScaOptions, W1Solution};
pub use stats::{update_saa_stats, SaaStats};
pub use theta::{assemble_theta, phase_ascent, solve_theta, solve_theta_passive, ThetaProblem, PHASE_SWEEPS};
pub use w2::{amplified_signal_budget, assemble_w2, solve_w2, solve_w2_unconstrained};

use crate::channel::ChannelError;
use crate::numerics::NumericsError;

#[derive(Debug, thiserror::Error)]
pub enum OptimizerError {
    #[error("energy budget {budget:e} W is negative at outer iteration {iteration}")]
    EnergyInfeasible { iteration: usize, budget: f64 },
    #[error("time split undefined: RIS power draw and harvestable power are both zero")]
    DegenerateTau,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
