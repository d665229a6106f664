//! Seeded session execution and Monte Carlo aggregation.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qbc_core::protocol::VerificationReport;
use qbc_core::session::{run_legacy_session, run_primary_session, ProtocolMode};
use qbc_core::stream::session_stream;
use qbc_core::transcript::{HeaderPayload, Transcript};

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::stats::{wilson_interval, Z95};

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutput {
    pub session_index: u64,
    pub commit_bit: u8,
    pub transcript: Transcript,
    pub report: VerificationReport,
    pub realized_p2: f64,
    pub n_pairs: u64,
}

pub fn session_id(seed: u64, session_index: u64) -> String {
    format!("{seed:016x}-{session_index:06}")
}

/// Runs session `session_index` of `config` on the stream derived from
/// `(config.seed, session_index)`.
pub fn run_session(config: &SimConfig, session_index: u64) -> Result<SessionOutput> {
    config.validate()?;
    let mut rng = session_stream(config.seed, session_index);
    let commit_bit = config.commit_bit.unwrap_or_else(|| u8::from(rng.random::<bool>()));
    let setup = config.setup();
    let run = match config.protocol_mode {
        ProtocolMode::Primary => run_primary_session(&setup, commit_bit, &mut rng)?,
        ProtocolMode::Legacy => run_legacy_session(&setup, commit_bit, config.bob_cheats, &mut rng)?,
    };
    let header = HeaderPayload {
        config_hash: config.hash(),
        seed: config.seed,
        session_index,
        protocol_mode: config.protocol_mode,
        pulse_count: run.records.len() as u64,
        session_duration: config.source.session_duration,
    };
    let transcript = Transcript::new(
        session_id(config.seed, session_index),
        header,
        run.announcement,
        run.opening,
        run.report.clone(),
    );
    if !transcript.is_well_ordered() {
        return Err(SimError::Invariant("transcript out of order".into()));
    }
    Ok(SessionOutput {
        session_index,
        commit_bit,
        transcript,
        report: run.report,
        realized_p2: run.realized_p2,
        n_pairs: run.n_pairs,
    })
}

/// Integer totals over sessions. Merging is commutative and associative, so
/// the pooled result does not depend on execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PooledCounts {
    pub sessions: u64,
    pub accepted: u64,
    pub n_sent: u64,
    pub n_announced: u64,
    pub n_matching_basis: u64,
    pub n_matching_errors: u64,
    pub n_out_of_basis: u64,
    pub n_out_of_basis_agree: u64,
    pub n_pairs: u64,
}

impl PooledCounts {
    pub fn from_output(out: &SessionOutput) -> Self {
        let r = &out.report;
        Self {
            sessions: 1,
            accepted: u64::from(r.verdict.is_accept()),
            n_sent: r.n_sent,
            n_announced: r.n_announced,
            n_matching_basis: r.n_matching_basis,
            n_matching_errors: r.n_matching_errors,
            n_out_of_basis: r.n_out_of_basis,
            n_out_of_basis_agree: r.n_out_of_basis_agree,
            n_pairs: out.n_pairs,
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            sessions: self.sessions + o.sessions,
            accepted: self.accepted + o.accepted,
            n_sent: self.n_sent + o.n_sent,
            n_announced: self.n_announced + o.n_announced,
            n_matching_basis: self.n_matching_basis + o.n_matching_basis,
            n_matching_errors: self.n_matching_errors + o.n_matching_errors,
            n_out_of_basis: self.n_out_of_basis + o.n_out_of_basis,
            n_out_of_basis_agree: self.n_out_of_basis_agree + o.n_out_of_basis_agree,
            n_pairs: self.n_pairs + o.n_pairs,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub counts: PooledCounts,
    pub matching_qber: f64,
    pub qber_ci_lo: f64,
    pub qber_ci_hi: f64,
    /// Matching QBER with the channel's symmetric flip `e` inverted out;
    /// absent when `e >= 0.5` makes the inversion singular.
    pub channel_corrected_qber: Option<f64>,
    pub out_of_basis_agreement: f64,
    /// Pair-backed share of all announced pulses.
    pub realized_p2: f64,
    pub accept_fraction: f64,
    pub reports: Vec<VerificationReport>,
    pub wall_clock_secs: f64,
}

impl AggregateStats {
    pub fn from_outputs(outputs: &[SessionOutput], qubit_error_e: f64, wall_clock_secs: f64) -> Self {
        let counts = outputs
            .iter()
            .map(PooledCounts::from_output)
            .fold(PooledCounts::default(), PooledCounts::merge);
        let (qber_ci_lo, qber_ci_hi) = wilson_interval(counts.n_matching_errors, counts.n_matching_basis, Z95);
        let matching_qber = ratio(counts.n_matching_errors, counts.n_matching_basis);
        let channel_corrected_qber =
            (qubit_error_e < 0.5).then(|| (matching_qber - qubit_error_e) / (1.0 - 2.0 * qubit_error_e));
        Self {
            counts,
            matching_qber,
            channel_corrected_qber,
            qber_ci_lo,
            qber_ci_hi,
            out_of_basis_agreement: ratio(counts.n_out_of_basis_agree, counts.n_out_of_basis),
            realized_p2: ratio(counts.n_pairs, counts.n_announced),
            accept_fraction: ratio(counts.accepted, counts.sessions),
            reports: outputs.iter().map(|o| o.report.clone()).collect(),
            wall_clock_secs,
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(in_unit(self.qber_ci_lo) && in_unit(self.qber_ci_hi) && self.qber_ci_lo <= self.qber_ci_hi) {
            return Err(SimError::Invariant(format!("bad interval [{}, {}]", self.qber_ci_lo, self.qber_ci_hi)));
        }
        if !in_unit(self.accept_fraction) {
            return Err(SimError::Invariant(format!("accept fraction {}", self.accept_fraction)));
        }
        Ok(())
    }
}

fn in_pool<T: Send>(parallelism: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match parallelism {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SimError::Invariant(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs sessions `first..first + count` concurrently; outputs come back in
/// index order.
pub fn run_sessions(config: &SimConfig, first: u64, count: u64) -> Result<Vec<SessionOutput>> {
    config.validate()?;
    in_pool(config.parallelism, || {
        (first..first + count).into_par_iter().map(|i| run_session(config, i)).collect()
    })?
}

pub fn run_batch(config: &SimConfig) -> Result<(Vec<SessionOutput>, AggregateStats)> {
    let start = Instant::now();
    let outputs = run_sessions(config, 0, config.trials)?;
    let stats = AggregateStats::from_outputs(&outputs, config.channel.qubit_error_e, start.elapsed().as_secs_f64());
    stats.check_invariants()?;
    Ok((outputs, stats))
}

pub fn run_monte_carlo(config: &SimConfig) -> Result<AggregateStats> {
    run_batch(config).map(|(_, stats)| stats)
}
