//! Flat `key = value` scenario files.
//!
//! Blank lines and `#` comments are ignored. Keys are case-insensitive. Any
//! key not present keeps the value of the base profile.

use std::path::Path;

use super::HarnessError;
use crate::config::ScenarioConfig;

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "n", "m", "k", "q", "b", "n_jam",
    "p_max_dbm", "p_jam_dbm", "p_int_dbm", "noise_dbm", "ris_noise_dbm",
    "eta1", "xi", "p_dc", "p_sc", "a_max_sq_db",
    "zeta0_db", "alpha_bu", "alpha_br", "alpha_ru", "alpha_ju", "alpha_jr", "alpha_iu", "alpha_r",
    "nakagami_m", "rwp_b", "rwp_upsilon",
    "bs", "ris", "ue_center", "ue_radius", "jammer_lo", "jammer_hi", "interferer_lo", "interferer_hi",
    "e_mse", "r_max", "i_max", "tol_outer", "tol_sca", "trials", "seed", "eval_realizations",
];

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    load_scenario_over(path, ScenarioConfig::paper())
}

/// Reads `path` on top of `base`.
pub fn load_scenario_over(path: &Path, base: ScenarioConfig) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text, base)
}

pub fn parse_scenario(text: &str, base: ScenarioConfig) -> Result<ScenarioConfig, HarnessError> {
    let mut cfg = base;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| HarnessError::Parse { line: i + 1, message };
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_ascii_lowercase();
        set_key(&mut cfg, &key, value.trim()).map_err(err)?;
    }
    cfg.validate().map_err(HarnessError::Validation)?;
    Ok(cfg)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid value '{v}' for {key}"))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn point(key: &str, v: &str) -> Result<[f64; 3], String> {
    let xs = list(key, v)?;
    <[f64; 3]>::try_from(xs).map_err(|_| format!("{key} needs three comma-separated coordinates"))
}

fn set_key(cfg: &mut ScenarioConfig, key: &str, v: &str) -> Result<(), String> {
    let g = &mut cfg.geometry;
    match key {
        "n" => cfg.n = num(key, v)?,
        "m" => cfg.m = num(key, v)?,
        "k" => cfg.k = num(key, v)?,
        "q" => cfg.q = num(key, v)?,
        "b" => cfg.b = num(key, v)?,
        "n_jam" => cfg.n_jam = num(key, v)?,
        "p_max_dbm" => cfg.p_max_dbm = num(key, v)?,
        "p_jam_dbm" => cfg.p_jam_dbm = num(key, v)?,
        "p_int_dbm" => cfg.p_int_dbm = num(key, v)?,
        "noise_dbm" => cfg.noise_dbm = num(key, v)?,
        "ris_noise_dbm" => cfg.ris_noise_dbm = num(key, v)?,
        "eta1" => cfg.eta1 = num(key, v)?,
        "xi" => cfg.xi = num(key, v)?,
        "p_dc" => cfg.p_dc = num(key, v)?,
        "p_sc" => cfg.p_sc = num(key, v)?,
        "a_max_sq_db" => cfg.a_max_sq_db = num(key, v)?,
        "zeta0_db" => cfg.zeta0_db = num(key, v)?,
        "alpha_bu" => cfg.alpha_bu = num(key, v)?,
        "alpha_br" => cfg.alpha_br = num(key, v)?,
        "alpha_ru" => cfg.alpha_ru = num(key, v)?,
        "alpha_ju" => cfg.alpha_ju = num(key, v)?,
        "alpha_jr" => cfg.alpha_jr = num(key, v)?,
        "alpha_iu" => cfg.alpha_iu = num(key, v)?,
        "alpha_r" => {
            let a = num(key, v)?;
            cfg.alpha_br = a;
            cfg.alpha_ru = a;
        }
        "nakagami_m" => cfg.nakagami_m = num(key, v)?,
        "rwp_b" => cfg.rwp_b = list(key, v)?,
        "rwp_upsilon" => cfg.rwp_upsilon = list(key, v)?,
        "bs" => g.bs = point(key, v)?,
        "ris" => g.ris = point(key, v)?,
        "ue_center" => g.ue_center = point(key, v)?,
        "ue_radius" => g.ue_radius = num(key, v)?,
        "jammer_lo" => g.jammer_lo = point(key, v)?,
        "jammer_hi" => g.jammer_hi = point(key, v)?,
        "interferer_lo" => g.interferer_lo = point(key, v)?,
        "interferer_hi" => g.interferer_hi = point(key, v)?,
        "e_mse" => cfg.e_mse = num(key, v)?,
        "r_max" => cfg.r_max = num(key, v)?,
        "i_max" => cfg.i_max = num(key, v)?,
        "tol_outer" => cfg.tol_outer = num(key, v)?,
        "tol_sca" => cfg.tol_sca = num(key, v)?,
        "trials" => cfg.trials = num(key, v)?,
        "seed" => cfg.seed = num(key, v)?,
        "eval_realizations" => cfg.eval_realizations = num(key, v)?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}
