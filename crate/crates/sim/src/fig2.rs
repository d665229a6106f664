//! Per-session success rates split by whether Bob's state was in the opened
//! basis, as plotted for the toy experiment.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::Result;
use crate::runner::{run_batch, SessionOutput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub session: u64,
    pub in_basis_rate: f64,
    pub out_of_basis_rate: f64,
    pub n_in_basis: u64,
    pub n_out_of_basis: u64,
}

impl Fig2Row {
    pub fn from_output(out: &SessionOutput) -> Self {
        let r = &out.report;
        Self {
            session: out.session_index,
            in_basis_rate: 1.0 - r.matching_qber,
            out_of_basis_rate: r.out_of_basis_agreement,
            n_in_basis: r.n_matching_basis,
            n_out_of_basis: r.n_out_of_basis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Summary {
    pub rows: Vec<Fig2Row>,
    /// Out-of-basis agreement pooled over all sessions.
    pub pooled_out_of_basis_rate: f64,
    pub in_basis_always_higher: bool,
}

pub fn fig2(config: &SimConfig) -> Result<(Vec<SessionOutput>, Fig2Summary)> {
    let (outputs, stats) = run_batch(config)?;
    let rows: Vec<Fig2Row> = outputs.iter().map(Fig2Row::from_output).collect();
    let in_basis_always_higher = rows.iter().all(|r| r.in_basis_rate > r.out_of_basis_rate);
    let summary = Fig2Summary { rows, pooled_out_of_basis_rate: stats.out_of_basis_agreement, in_basis_always_higher };
    Ok((outputs, summary))
}
