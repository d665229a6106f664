//! One-parameter sweeps over a configuration.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::runner::{run_monte_carlo, AggregateStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param_value: f64,
    pub matching_qber: f64,
    pub qber_ci_lo: f64,
    pub qber_ci_hi: f64,
    pub out_of_basis_agreement: f64,
    pub realized_p2: f64,
    pub accept_fraction: f64,
    pub n_announced: u64,
}

impl SweepRow {
    pub fn new(param_value: f64, stats: &AggregateStats) -> Self {
        Self {
            param_value,
            matching_qber: stats.matching_qber,
            qber_ci_lo: stats.qber_ci_lo,
            qber_ci_hi: stats.qber_ci_hi,
            out_of_basis_agreement: stats.out_of_basis_agreement,
            realized_p2: stats.realized_p2,
            accept_fraction: stats.accept_fraction,
            n_announced: stats.counts.n_announced,
        }
    }
}

/// Returns a copy of `config` with the numeric field at the dotted
/// `path` (e.g. `channel.visibility_v`, `channel.basis_efficiency.1`) set to
/// `value`.
pub fn with_param(config: &SimConfig, path: &str, value: f64) -> Result<SimConfig> {
    let mut doc = serde_json::to_value(config)?;
    let pointer = format!("/{}", path.replace('.', "/"));
    let slot = doc
        .pointer_mut(&pointer)
        .ok_or_else(|| SimError::BadConfig(format!("unknown parameter path `{path}`")))?;
    *slot = match slot {
        Value::Number(n) if n.is_u64() || n.is_i64() => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(SimError::BadConfig(format!("`{path}` takes non-negative integers, got {value}")));
            }
            Value::from(value as u64)
        }
        Value::Number(_) | Value::Null => Value::from(value),
        _ => return Err(SimError::BadConfig(format!("`{path}` is not a numeric field"))),
    };
    let updated: SimConfig = serde_json::from_value(doc).map_err(|e| SimError::BadConfig(e.to_string()))?;
    updated.validate()?;
    Ok(updated)
}

pub fn parse_values(csv: &str) -> Result<Vec<f64>> {
    csv.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| SimError::BadConfig(format!("bad value `{s}`: {e}"))))
        .collect()
}

pub fn sweep(config: &SimConfig, path: &str, values: &[f64]) -> Result<Vec<(f64, AggregateStats)>> {
    // Validate every point before running any of them.
    let configs = values
        .iter()
        .map(|&v| with_param(config, path, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>>>()?;
    configs.into_iter().map(|(v, c)| run_monte_carlo(&c).map(|s| (v, s))).collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
