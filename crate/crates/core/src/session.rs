//! End-to-end sessions: prepare, transmit, commit, open, verify.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{cheat_commit, AdversaryConfig};
use crate::error::{ConfigError, ProtocolError};
use crate::photonics::{expected_detection_rate, propagate, receive_time_bin, ChannelModel, SourceModel};
use crate::protocol::{
    self, alice_commit, alice_open, bob_prepare_session, bob_verify, Announcement, OpeningRecord,
    PulseRecord, RejectReason, Thresholds, VerificationReport, Verdict,
};
use crate::qstate::{MeasBasis, StateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolMode {
    /// Alice commits through her measurement basis.
    #[default]
    Primary,
    /// Role-swapped variant: Bob commits through the pair of states he sends.
    Legacy,
}

/// Physical and policy parameters shared by every session of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SessionSetup {
    pub source: SourceModel,
    pub channel: ChannelModel,
    #[serde(default)]
    pub adversary: AdversaryConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl SessionSetup {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.source.validate()?;
        self.channel.validate()?;
        self.adversary.validate()?;
        self.thresholds.validate()
    }

    pub fn expected_rate(&self) -> f64 {
        expected_detection_rate(&self.source, &self.channel)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRun {
    /// Bob's log. In the legacy variant these are the labels Bob reveals.
    pub records: Vec<PulseRecord>,
    pub announcement: Announcement,
    pub opening: OpeningRecord,
    pub report: VerificationReport,
    pub realized_p2: f64,
    pub n_pairs: u64,
}

/// One run of the protocol where Alice commits to `commit_bit`. A cheating
/// Alice (per `setup.adversary`) opens to the same bit.
pub fn run_primary_session<R: Rng + ?Sized>(
    setup: &SessionSetup,
    commit_bit: u8,
    rng: &mut R,
) -> Result<SessionRun, ProtocolError> {
    setup.validate()?;
    if commit_bit > 1 {
        return Err(ConfigError::InvalidBit(commit_bit).into());
    }
    let records = bob_prepare_session(&setup.source, rng);
    let arrivals = records
        .iter()
        .map(|r| propagate(r.pulse_id, r.label, &setup.source, &setup.channel, rng))
        .collect::<Result<Vec<_>, _>>()?;

    let (announcement, opening, realized_p2, n_pairs) = match cheat_commit(
        &arrivals,
        &setup.adversary,
        &setup.source,
        &setup.channel,
        setup.thresholds.rate_floor,
        rng,
    )? {
        None => {
            let (announcement, store) = alice_commit(commit_bit, &arrivals, &setup.channel, rng)?;
            (announcement, alice_open(&store, commit_bit)?, 0.0, 0)
        }
        Some(cheat) => {
            let opening = cheat.store.open(commit_bit, rng)?;
            (cheat.announcement, opening, cheat.realized_p2, cheat.n_pairs)
        }
    };
    let report = bob_verify(&records, &announcement, &opening, setup.expected_rate(), &setup.thresholds);
    Ok(SessionRun { records, announcement, opening, report, realized_p2, n_pairs })
}

/// The role-swapped variant. Bob commits to `bob_bit` by sending only states
/// of the matching basis; Alice measures each pulse in a random basis and
/// announces her clicks; at opening Bob reveals his labels and Alice checks
/// the same-basis ones.
///
/// A cheating Bob sends half of an entangled pair and keeps the other half,
/// which lets him choose `bob_bit` only at opening. With probability
/// `qnd_success_q` his partner qubit survives storage and his revealed label
/// matches the state Alice received up to a flip with probability
/// `1 - storage_fidelity_f`; otherwise he has to guess.
pub fn run_legacy_session<R: Rng + ?Sized>(
    setup: &SessionSetup,
    bob_bit: u8,
    bob_cheats: bool,
    rng: &mut R,
) -> Result<SessionRun, ProtocolError> {
    setup.validate()?;
    let basis = MeasBasis::for_bit(bob_bit).ok_or(ConfigError::InvalidBit(bob_bit))?;
    let pick = |rng: &mut R| basis.labels()[usize::from(rng.random::<bool>())];

    let mut records = bob_prepare_session(&setup.source, rng);
    let mut alice_outcomes = BTreeMap::new();
    for record in &mut records {
        // Measuring the kept half of a maximally entangled pair in `basis`
        // leaves Alice's photon in a uniformly random state of that basis,
        // so the physical state is drawn the same way for both Bobs.
        let sent = pick(rng);
        record.label = if !bob_cheats {
            sent
        } else if rng.random::<f64>() < setup.adversary.qnd_success_q {
            if rng.random::<f64>() < setup.adversary.storage_fidelity_f {
                sent
            } else {
                sent.orthogonal()
            }
        } else {
            pick(rng)
        };
        let arrival = propagate(record.pulse_id, sent, &setup.source, &setup.channel, rng)?;
        let alice_basis = MeasBasis::COMMITMENT[usize::from(rng.random::<bool>())];
        if let Some(label) = receive_time_bin(&arrival.photons, alice_basis, &setup.channel, rng) {
            alice_outcomes.insert(record.pulse_id, label);
        }
    }

    let announcement = Announcement { detected_pulse_ids: alice_outcomes.keys().copied().collect() };
    let opening = OpeningRecord {
        commitment_bit: bob_bit,
        basis,
        outcomes: announcement
            .detected_pulse_ids
            .iter()
            .map(|&id| (id, records[id as usize].label))
            .collect(),
    };
    let report = alice_verify_legacy(&alice_outcomes, &announcement, &opening, records.len(), setup);
    Ok(SessionRun { records, announcement, opening, report, realized_p2: 0.0, n_pairs: 0 })
}

/// Alice's check of Bob's legacy opening: revealed labels must lie in the
/// committed basis and agree with her same-basis outcomes. No rate check, the
/// detection rate is Alice's own.
pub fn alice_verify_legacy(
    alice_outcomes: &BTreeMap<u64, StateLabel>,
    announcement: &Announcement,
    opening: &OpeningRecord,
    n_sent: usize,
    setup: &SessionSetup,
) -> VerificationReport {
    let n_announced = announcement.len() as u64;
    let mut report = VerificationReport {
        n_sent: n_sent as u64,
        n_announced,
        n_matching_basis: 0,
        n_matching_errors: 0,
        matching_qber: 0.0,
        n_out_of_basis: 0,
        n_out_of_basis_agree: 0,
        out_of_basis_agreement: 0.0,
        detection_rate: if n_sent == 0 { 0.0 } else { n_announced as f64 / n_sent as f64 },
        expected_rate: setup.expected_rate(),
        verdict: Verdict::Accept,
    };
    let well_formed = MeasBasis::for_bit(opening.commitment_bit) == Some(opening.basis)
        && opening.outcomes.len() == announcement.len()
        && announcement.detected_pulse_ids.iter().all(|id| {
            opening.outcomes.get(id).is_some_and(|l| opening.basis.contains(*l))
                && alice_outcomes.contains_key(id)
        });
    if !well_formed {
        report.verdict = Verdict::Reject(RejectReason::Malformed);
        return report;
    }
    for (id, revealed) in &opening.outcomes {
        protocol::tally(&mut report, *revealed, alice_outcomes[id]);
    }
    protocol::finish_report(&mut report);
    report.verdict = protocol::rate_and_qber_verdict(&report, &setup.thresholds, false);
    report
}
