//! Scenario parameters shared by channel synthesis, the optimizer and the
//! harness. Powers given in dBm are kept in dBm here and converted on access.

use crate::channel::Geometry;

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// BS antennas.
    pub n: usize,
    /// RIS reflecting elements.
    pub m: usize,
    pub k: usize,
    pub q: usize,
    pub b: usize,
    pub n_jam: usize,

    pub p_max_dbm: f64,
    pub p_jam_dbm: f64,
    pub p_int_dbm: f64,
    /// UE noise power for both stages.
    pub noise_dbm: f64,
    pub ris_noise_dbm: f64,

    pub eta1: f64,
    pub xi: f64,
    /// Per-element DC biasing power, watts.
    pub p_dc: f64,
    /// Per-element control circuit power, watts.
    pub p_sc: f64,
    /// Maximum amplification gain `A_max^2` in dB.
    pub a_max_sq_db: f64,

    pub zeta0_db: f64,
    pub alpha_bu: f64,
    pub alpha_br: f64,
    pub alpha_ru: f64,
    pub alpha_ju: f64,
    pub alpha_jr: f64,
    pub alpha_iu: f64,

    pub nakagami_m: f64,
    pub rwp_b: Vec<f64>,
    pub rwp_upsilon: Vec<f64>,
    pub geometry: Geometry,

    pub e_mse: f64,
    pub r_max: usize,
    pub i_max: usize,
    /// Outer relative-change tolerance.
    pub tol_outer: f64,
    /// Inner SCA relative-change tolerance.
    pub tol_sca: f64,
    pub trials: usize,
    pub seed: u64,
    /// Fresh realizations used to evaluate a solved trial.
    pub eval_realizations: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl ScenarioConfig {
    /// Full-size simulation scenario.
    pub fn paper() -> Self {
        Self {
            n: 8,
            m: 25,
            k: 4,
            q: 3,
            b: 4,
            n_jam: 8,
            p_max_dbm: 30.0,
            p_jam_dbm: 10.0,
            p_int_dbm: 10.0,
            noise_dbm: -105.0,
            ris_noise_dbm: -105.0,
            eta1: 0.8,
            xi: 1.25,
            p_dc: 10e-6,
            p_sc: 10e-6,
            a_max_sq_db: 40.0,
            zeta0_db: 30.0,
            alpha_bu: 2.75,
            alpha_br: 2.2,
            alpha_ru: 2.2,
            alpha_ju: 2.5,
            alpha_jr: 2.5,
            alpha_iu: 2.7,
            nakagami_m: 1.0,
            rwp_b: vec![735.0 / 72.0, -1190.0 / 72.0, 455.0 / 72.0],
            rwp_upsilon: vec![1.0, 3.0, 5.0],
            geometry: Geometry::default(),
            e_mse: 0.05,
            r_max: 50,
            i_max: 15,
            tol_outer: 1e-3,
            tol_sca: 1e-3,
            trials: 500,
            seed: 1,
            eval_realizations: 100,
        }
    }

    /// Reduced scenario for quick runs.
    pub fn desk() -> Self {
        Self {
            n: 4,
            m: 8,
            k: 2,
            q: 1,
            b: 2,
            trials: 50,
            ..Self::paper()
        }
    }

    pub fn p_max(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }

    pub fn p_jam(&self) -> f64 {
        dbm_to_watts(self.p_jam_dbm)
    }

    pub fn p_int(&self) -> f64 {
        dbm_to_watts(self.p_int_dbm)
    }

    pub fn noise(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn ris_noise(&self) -> f64 {
        dbm_to_watts(self.ris_noise_dbm)
    }

    pub fn a_max(&self) -> f64 {
        10f64.powf(self.a_max_sq_db / 20.0)
    }

    /// Checks every invariant of a user-supplied scenario.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("N", self.n), ("M", self.m), ("K", self.k), ("Q", self.q), ("B", self.b), ("N_Jam", self.n_jam)] {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        for (name, a) in [
            ("alpha_bu", self.alpha_bu),
            ("alpha_br", self.alpha_br),
            ("alpha_ru", self.alpha_ru),
            ("alpha_ju", self.alpha_ju),
            ("alpha_jr", self.alpha_jr),
            ("alpha_iu", self.alpha_iu),
        ] {
            if !(1.5..=6.0).contains(&a) {
                return Err(format!("{name} must lie in [1.5, 6]"));
            }
        }
        if !(self.e_mse >= 0.0) {
            return Err("e_mse must be nonnegative".into());
        }
        if !(self.eta1 > 0.0 && self.eta1 <= 1.0) {
            return Err("eta1 must lie in (0, 1]".into());
        }
        if !(self.xi >= 1.0) {
            return Err("xi must be at least 1".into());
        }
        if !(self.p_dc > 0.0 && self.p_sc > 0.0) {
            return Err("p_dc and p_sc must be positive".into());
        }
        if !(self.a_max_sq_db >= 0.0) {
            return Err("a_max_sq_db must be nonnegative (A_max >= 1)".into());
        }
        if !(self.nakagami_m >= 0.5) {
            return Err("nakagami_m must be at least 0.5".into());
        }
        if self.rwp_b.len() != self.rwp_upsilon.len() || self.rwp_b.is_empty() {
            return Err("rwp_b and rwp_upsilon must have the same nonzero length".into());
        }
        if self.r_max == 0 || self.i_max == 0 || self.trials == 0 || self.eval_realizations == 0 {
            return Err("r_max, i_max, trials and eval_realizations must be positive".into());
        }
        if !(self.tol_outer > 0.0 && self.tol_sca > 0.0) {
            return Err("tolerances must be positive".into());
        }
        self.geometry.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(10.0) - 0.01).abs() < 1e-15);
        assert!((watts_to_dbm(dbm_to_watts(-105.0)) + 105.0).abs() < 1e-9);
    }

    #[test]
    fn amplitude_cap_from_gain() {
        assert!((ScenarioConfig::paper().a_max() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn defaults_validate() {
        assert!(ScenarioConfig::paper().validate().is_ok());
        assert!(ScenarioConfig::desk().validate().is_ok());
        let bad = ScenarioConfig { m: 0, ..ScenarioConfig::paper() };
        assert!(bad.validate().unwrap_err().contains('M'));
    }
}
