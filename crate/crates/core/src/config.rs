//! Flat `key = value` parameter files.
//!
//! ```text
//! n_end_nodes = 5
//! q_link = 0.01
//! q_bsm = 0.95   # optional, defaults to 1
//! ```
//!
//! Every [`SimParams`] field may appear. `n_end_nodes` and `q_link` are
//! required; the rest default to a noiseless network with `dt = 1`,
//! `shots = 10000`, `t_cl = 0` and a fixed seed. Unknown keys are rejected.

use std::path::Path;

use toml::{Table, Value};

use crate::error::{config, Error, Result};
use crate::model::SimParams;

pub const KEYS: [&str; 11] = [
    "n_end_nodes",
    "q_link",
    "q_bsm",
    "p_link",
    "p_mem",
    "p_bsm",
    "p_ghz",
    "dt",
    "t_cl",
    "shots",
    "seed",
];

pub const REQUIRED: [&str; 2] = ["n_end_nodes", "q_link"];

pub fn parse_config(text: &str) -> Result<Table> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("malformed config: {}", e.message())))?;
    check_keys(&table)?;
    Ok(table)
}

pub fn load_config(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn check_keys(table: &Table) -> Result<()> {
    let unknown: Vec<&str> =
        table.keys().map(String::as_str).filter(|k| !KEYS.contains(k)).collect();
    if !unknown.is_empty() {
        return config(format!("unknown config key(s): {}", unknown.join(", ")));
    }
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table() || v.is_array()) {
        return config(format!("key `{k}` must hold a single number"));
    }
    Ok(())
}

/// Applies one `key=value` assignment on top of `table`.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let Some((key, value)) = assignment.split_once('=') else {
        return config(format!("override `{assignment}` is not of the form key=value"));
    };
    let parsed = parse_config(&format!("{} = {}", key.trim(), value.trim()))?;
    table.extend(parsed);
    Ok(())
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        _ => config(format!("key `{key}` must be a number")),
    }
}

fn count(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => config(format!("key `{key}` must be a non-negative integer")),
    }
}

/// Sets one named parameter from a number, checking integrality where needed.
pub fn set_param(params: &mut SimParams, key: &str, value: f64) -> Result<()> {
    let integral = || -> Result<u64> {
        if value >= 0.0 && value.fract() == 0.0 && value < 9.0e15 {
            Ok(value as u64)
        } else {
            config(format!("key `{key}` must be a non-negative integer, got {value}"))
        }
    };
    match key {
        "n_end_nodes" => params.n_end_nodes = integral()? as usize,
        "q_link" => params.q_link = value,
        "q_bsm" => params.q_bsm = value,
        "p_link" => params.p_link = value,
        "p_mem" => params.p_mem = value,
        "p_bsm" => params.p_bsm = value,
        "p_ghz" => params.p_ghz = value,
        "dt" => params.dt = value,
        "t_cl" => params.t_cl = value,
        "shots" => params.shots = integral()? as usize,
        "seed" => params.seed = integral()?,
        _ => return config(format!("unknown parameter `{key}`")),
    }
    Ok(())
}

/// Builds validated parameters, reporting all missing required keys at once.
pub fn params_from_table(table: &Table) -> Result<SimParams> {
    check_keys(table)?;
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        return config(format!("missing required key(s): {}", missing.join(", ")));
    }
    let mut params = SimParams::new(0, 0.0);
    for (key, v) in table {
        match key.as_str() {
            "n_end_nodes" | "shots" => set_param(&mut params, key, count(key, v)? as f64)?,
            "seed" => params.seed = count(key, v)?,
            _ => set_param(&mut params, key, number(key, v)?)?,
        }
    }
    params.validate()?;
    Ok(params)
}

/// Renders parameters in the format read by [`parse_config`].
pub fn to_config_text(params: &SimParams) -> String {
    format!(
        "n_end_nodes = {}\nq_link = {:?}\nq_bsm = {:?}\np_link = {:?}\np_mem = {:?}\np_bsm = {:?}\n\
         p_ghz = {:?}\ndt = {:?}\nt_cl = {:?}\nshots = {}\nseed = {}\n",
        params.n_end_nodes,
        params.q_link,
        params.q_bsm,
        params.p_link,
        params.p_mem,
        params.p_bsm,
        params.p_ghz,
        params.dt,
        params.t_cl,
        params.shots,
        params.seed
    )
}
