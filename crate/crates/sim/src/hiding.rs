//! Does the announcement leak the committed bit?
//!
//! Runs honest sessions for each bit and compares the distributions of the
//! announced-detection counts with a two-sample chi-square test.

use serde::{Deserialize, Serialize};

use qbc_core::adversary::AdversaryConfig;
use qbc_core::session::ProtocolMode;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::runner::run_sessions;
use crate::stats::{chi_square_two_sample, ChiSquareResult};

pub const MIN_SESSIONS_PER_BIT: u64 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HidingResult {
    pub sessions_per_bit: u64,
    pub announced_bit0: Vec<u64>,
    pub announced_bit1: Vec<u64>,
    pub chi_square: ChiSquareResult,
}

impl HidingResult {
    pub fn statistic(&self) -> f64 {
        self.chi_square.statistic
    }

    pub fn p_value(&self) -> f64 {
        self.chi_square.p_value
    }
}

/// Bins per test: about 20 pooled observations per bin, between 2 and 10.
fn bin_count(sessions_per_bit: u64) -> usize {
    ((2 * sessions_per_bit / 20) as usize).clamp(2, 10)
}

pub fn hiding_test(config: &SimConfig, sessions_per_bit: u64) -> Result<HidingResult> {
    if sessions_per_bit < MIN_SESSIONS_PER_BIT {
        return Err(SimError::Precondition(format!(
            "hiding test needs at least {MIN_SESSIONS_PER_BIT} sessions per bit, got {sessions_per_bit}"
        )));
    }
    let mut honest = config.clone();
    honest.adversary = AdversaryConfig::default();
    honest.protocol_mode = ProtocolMode::Primary;

    let announced = |bit: u8, first: u64| -> Result<Vec<u64>> {
        let mut c = honest.clone();
        c.commit_bit = Some(bit);
        Ok(run_sessions(&c, first, sessions_per_bit)?.iter().map(|o| o.report.n_announced).collect())
    };
    let announced_bit0 = announced(0, 0)?;
    let announced_bit1 = announced(1, sessions_per_bit)?;
    let chi_square = chi_square_two_sample(&announced_bit0, &announced_bit1, bin_count(sessions_per_bit));
    Ok(HidingResult { sessions_per_bit, announced_bit0, announced_bit1, chi_square })
}
