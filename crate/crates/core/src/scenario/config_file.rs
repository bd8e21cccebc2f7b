//! Flat `key = value` scenario files.
//!
//! ```text
//! # a 48-element surface
//! n_ris = 48
//! p_c = 6 dBW
//! p_j = 30 dBm
//! gamma_min = -40 dB
//! geometry.target = 70, 20
//! path_loss_exponents.ris = 2.2
//! ```
//! Keys are the `ScenarioConfig` field names. Powers accept `W`, `dBW` and
//! `dBm`; dimensionless gains accept a `dB` suffix. Unknown keys are errors.

use std::path::Path;

use super::{db_to_linear, dbm_to_watts, ScenarioConfig};
use crate::error::{Error, Result};

pub fn read_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses a config file on top of the defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        apply(&mut cfg, key.trim(), value.trim())
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Sets one key with the file syntax. The result is not validated, so
/// coupled fields (`beta_t`, `beta_r`) can be changed one at a time.
pub fn set_value(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    apply(cfg, key.trim(), value.trim()).map_err(Error::Config)
}

fn apply(cfg: &mut ScenarioConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "n_tx" => cfg.n_tx = parse_count(value)?,
        "n_jam" => cfg.n_jam = parse_count(value)?,
        "n_users" => cfg.n_users = parse_count(value)?,
        "n_ris" => cfg.n_ris = parse_count(value)?,
        "p_c" => cfg.p_c = parse_power(value)?,
        "p_s" => cfg.p_s = parse_power(value)?,
        "p_j" => cfg.p_j = parse_power(value)?,
        "p_d" => cfg.p_d = parse_power(value)?,
        "sigma_n_sq" => cfg.sigma_n_sq = parse_power(value)?,
        "sigma_d_sq" => cfg.sigma_d_sq = parse_power(value)?,
        "zeta_sq" => cfg.zeta_sq = parse_gain(value)?,
        "g_th" => cfg.g_th = parse_gain(value)?,
        "gamma_min" => cfg.gamma_min = parse_gain(value)?,
        "w1" => cfg.w1 = parse_float(value)?,
        "w2" => cfg.w2 = parse_float(value)?,
        "beta_t" => cfg.beta_t = parse_float(value)?,
        "beta_r" => cfg.beta_r = parse_float(value)?,
        "rician_k" => cfg.rician_k = parse_gain(value)?,
        "seed" => cfg.seed = value.parse().map_err(|e| format!("seed: {e}"))?,
        "p12_uses_pc" => cfg.p12_uses_pc = parse_bool(value)?,
        "clip_penalty" => cfg.clip_penalty = parse_bool(value)?,
        "detector_distance" => cfg.geometry.set_detector_distance(parse_float(value)?),
        "geometry.user_radius" => cfg.geometry.user_radius = parse_float(value)?,
        "path_loss_exponents.direct" => cfg.path_loss_exponents.direct = parse_float(value)?,
        "path_loss_exponents.ris" => cfg.path_loss_exponents.ris = parse_float(value)?,
        "path_loss_exponents.los" => cfg.path_loss_exponents.los = parse_float(value)?,
        _ => {
            if let Some(node) = key.strip_prefix("geometry.") {
                let slot = cfg
                    .geometry
                    .node_mut(node)
                    .ok_or_else(|| format!("unknown geometry node `{node}`"))?;
                *slot = parse_point(value)?;
            } else {
                return Err(format!("unknown key `{key}`"));
            }
        }
    }
    Ok(())
}

fn parse_float(v: &str) -> std::result::Result<f64, String> {
    v.trim().parse::<f64>().map_err(|_| format!("not a number: `{v}`"))
}

fn parse_count(v: &str) -> std::result::Result<usize, String> {
    v.trim().parse::<usize>().map_err(|_| format!("not a count: `{v}`"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("not a boolean: `{other}`")),
    }
}

fn parse_point(v: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `x, y`, got `{v}`"));
    }
    Ok([parse_float(parts[0])?, parse_float(parts[1])?])
}

/// Linear gain, or decibels with a `dB` suffix.
fn parse_gain(v: &str) -> std::result::Result<f64, String> {
    let v = v.trim();
    match v.strip_suffix("dB") {
        Some(num) => Ok(db_to_linear(parse_float(num)?)),
        None => parse_float(v),
    }
}

/// Power in watts; accepts `W`, `dBW` and `dBm` suffixes (bare numbers are watts).
pub fn parse_power(v: &str) -> std::result::Result<f64, String> {
    let v = v.trim();
    if let Some(num) = v.strip_suffix("dBm") {
        Ok(dbm_to_watts(parse_float(num)?))
    } else if let Some(num) = v.strip_suffix("dBW") {
        Ok(db_to_linear(parse_float(num)?))
    } else if let Some(num) = v.strip_suffix('W') {
        parse_float(num)
    } else {
        parse_float(v)
    }
}
