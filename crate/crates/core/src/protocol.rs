//! Commit, announce, open and verify.
//!
//! Bob sends pulses at Poisson-distributed times and keeps a private log of
//! what he sent. Alice measures everything in the basis that encodes her bit
//! (0 → XY, 1 → LR) and immediately announces which pulses clicked. At
//! opening she reveals the bit and every outcome; Bob checks the outcomes on
//! pulses he prepared in that basis and checks the detection rate against
//! what an honest receiver would see.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ProtocolError};
use crate::photonics::{self, receive_time_bin, ChannelModel, PulseArrival, SourceModel};
use crate::qstate::{MeasBasis, StateLabel};

/// Bob's private log entry for one pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub pulse_id: u64,
    pub send_time: f64,
    pub label: StateLabel,
    pub mu: f64,
}

/// Alice's public detection announcement. Pulse ids only, sorted; nothing in
/// here depends on the basis she measured in.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Announcement {
    pub detected_pulse_ids: Vec<u64>,
}

impl Announcement {
    pub fn len(&self) -> usize {
        self.detected_pulse_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detected_pulse_ids.is_empty()
    }
}

/// Alice's private outcomes between commit and opening.
#[derive(Debug, Clone, PartialEq)]
pub struct AliceStore {
    bit: u8,
    outcomes: BTreeMap<u64, StateLabel>,
}

impl AliceStore {
    pub fn committed_bit(&self) -> u8 {
        self.bit
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpeningRecord {
    pub commitment_bit: u8,
    pub basis: MeasBasis,
    #[serde(with = "pulse_id_keys")]
    pub outcomes: BTreeMap<u64, StateLabel>,
}

// Pulse ids are written as string keys, as JSON requires, and parsed back
// explicitly: buffered (flattened) deserialization won't coerce them.
mod pulse_id_keys {
    use alloc::collections::BTreeMap;
    use alloc::string::{String, ToString};

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::qstate::StateLabel;

    pub fn serialize<S: Serializer>(map: &BTreeMap<u64, StateLabel>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, StateLabel>, D::Error> {
        BTreeMap::<String, StateLabel>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest matching-basis error rate Bob accepts.
    pub qber_threshold: f64,
    /// Minimum announced rate as a fraction of the honest expectation.
    pub rate_floor: f64,
    /// Maximum announced rate as a multiple of the honest expectation.
    #[serde(default = "default_rate_ceiling")]
    pub rate_ceiling: f64,
}

fn default_rate_ceiling() -> f64 {
    1.5
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { qber_threshold: 0.05, rate_floor: 0.5, rate_ceiling: default_rate_ceiling() }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), ConfigError> {
        photonics::probability("thresholds.qber_threshold", self.qber_threshold)?;
        photonics::probability("thresholds.rate_floor", self.rate_floor)?;
        if !(self.rate_ceiling.is_finite() && self.rate_ceiling >= 1.0) {
            return Err(ConfigError::NotPositive {
                field: "thresholds.rate_ceiling (>= 1)",
                value: self.rate_ceiling,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Malformed,
    EmptySession,
    RateTooLow,
    RateAnomaly,
    NoEvidence,
    QberExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n_sent: u64,
    pub n_announced: u64,
    pub n_matching_basis: u64,
    pub n_matching_errors: u64,
    /// `n_matching_errors / n_matching_basis`, 0 when nothing matched.
    pub matching_qber: f64,
    pub n_out_of_basis: u64,
    /// Out-of-basis pulses whose claimed detector bit equals Bob's.
    pub n_out_of_basis_agree: u64,
    pub out_of_basis_agreement: f64,
    pub detection_rate: f64,
    pub expected_rate: f64,
    pub verdict: Verdict,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Bob's side of step one: pulse times from a homogeneous Poisson process of
/// rate `pulse_rate` on `[0, session_duration]`, labels uniform over the four
/// BB84 states. An empty list is a valid (if useless) session.
pub fn bob_prepare_session<R: Rng + ?Sized>(source: &SourceModel, rng: &mut R) -> Vec<PulseRecord> {
    let mut records = Vec::new();
    if source.session_duration <= 0.0 {
        return records;
    }
    let gaps = Exp::new(source.pulse_rate).expect("pulse rate must be positive");
    let mut t = 0.0;
    loop {
        t += gaps.sample(rng);
        if t > source.session_duration {
            break;
        }
        let label = StateLabel::BB84[rng.random_range(0..4)];
        records.push(PulseRecord {
            pulse_id: records.len() as u64,
            send_time: t,
            label,
            mu: source.mean_photons_mu,
        });
    }
    records
}

/// Honest commitment: every pulse is measured through the interferometer set
/// to the basis encoding `bit`, and exactly the clicked pulses are announced.
pub fn alice_commit<R: Rng + ?Sized>(
    bit: u8,
    arrivals: &[PulseArrival],
    channel: &ChannelModel,
    rng: &mut R,
) -> Result<(Announcement, AliceStore), ConfigError> {
    let basis = MeasBasis::for_bit(bit).ok_or(ConfigError::InvalidBit(bit))?;
    let mut outcomes = BTreeMap::new();
    for arrival in arrivals {
        if let Some(label) = receive_time_bin(&arrival.photons, basis, channel, rng) {
            outcomes.insert(arrival.pulse_id, label);
        }
    }
    let announcement = Announcement { detected_pulse_ids: outcomes.keys().copied().collect() };
    Ok((announcement, AliceStore { bit, outcomes }))
}

/// Honest opening. Refuses to open a bit other than the committed one.
pub fn alice_open(store: &AliceStore, bit: u8) -> Result<OpeningRecord, ProtocolError> {
    if bit != store.bit {
        return Err(ProtocolError::BitMismatch { committed: store.bit, opened: bit });
    }
    let basis = MeasBasis::for_bit(bit).ok_or(ConfigError::InvalidBit(bit))?;
    Ok(OpeningRecord { commitment_bit: bit, basis, outcomes: store.outcomes.clone() })
}

/// Opening without the honesty check. If `bit` differs from the committed
/// bit, Alice has no outcome in the claimed basis and guesses uniformly.
pub fn alice_open_as<R: Rng + ?Sized>(
    store: &AliceStore,
    bit: u8,
    rng: &mut R,
) -> Result<OpeningRecord, ProtocolError> {
    if bit == store.bit {
        return alice_open(store, bit);
    }
    let basis = MeasBasis::for_bit(bit).ok_or(ConfigError::InvalidBit(bit))?;
    let labels = basis.labels();
    let outcomes = store
        .outcomes
        .keys()
        .map(|&id| (id, labels[usize::from(rng.random::<bool>())]))
        .collect();
    Ok(OpeningRecord { commitment_bit: bit, basis, outcomes })
}

fn malformed(records: &[PulseRecord], ann: &Announcement, open: &OpeningRecord) -> bool {
    if MeasBasis::for_bit(open.commitment_bit) != Some(open.basis) {
        return true;
    }
    if !ann.detected_pulse_ids.windows(2).all(|w| w[0] < w[1]) {
        return true;
    }
    if ann.detected_pulse_ids.len() != open.outcomes.len() {
        return true;
    }
    let sent = |id: &u64| records.binary_search_by_key(id, |r| r.pulse_id).is_ok();
    !ann.detected_pulse_ids
        .iter()
        .zip(open.outcomes.iter())
        .all(|(id, (open_id, label))| id == open_id && sent(id) && open.basis.contains(*label))
}

/// Bob's opening-stage check. Pure: the same inputs always give the same
/// report. `records` must be sorted by pulse id, as produced by
/// [`bob_prepare_session`].
pub fn bob_verify(
    records: &[PulseRecord],
    ann: &Announcement,
    open: &OpeningRecord,
    expected_rate: f64,
    thresholds: &Thresholds,
) -> VerificationReport {
    let n_sent = records.len() as u64;
    let n_announced = ann.len() as u64;
    let detection_rate = ratio(n_announced, n_sent);
    let mut report = VerificationReport {
        n_sent,
        n_announced,
        n_matching_basis: 0,
        n_matching_errors: 0,
        matching_qber: 0.0,
        n_out_of_basis: 0,
        n_out_of_basis_agree: 0,
        out_of_basis_agreement: 0.0,
        detection_rate,
        expected_rate,
        verdict: Verdict::Accept,
    };
    if malformed(records, ann, open) {
        report.verdict = Verdict::Reject(RejectReason::Malformed);
        return report;
    }
    for (id, claimed) in &open.outcomes {
        let idx = records
            .binary_search_by_key(id, |r| r.pulse_id)
            .expect("checked by malformed()");
        tally(&mut report, records[idx].label, *claimed);
    }
    finish_report(&mut report);
    report.verdict = rate_and_qber_verdict(&report, thresholds, true);
    report
}

/// Adds one opened pulse to the counts: `sent` is the prepared label and
/// `claimed` the revealed outcome.
pub(crate) fn tally(report: &mut VerificationReport, sent: StateLabel, claimed: StateLabel) {
    if sent.basis() == claimed.basis() {
        report.n_matching_basis += 1;
        if sent != claimed {
            report.n_matching_errors += 1;
        }
    } else {
        report.n_out_of_basis += 1;
        if sent.bit_value() == claimed.bit_value() {
            report.n_out_of_basis_agree += 1;
        }
    }
}

pub(crate) fn finish_report(report: &mut VerificationReport) {
    report.matching_qber = ratio(report.n_matching_errors, report.n_matching_basis);
    report.out_of_basis_agreement = ratio(report.n_out_of_basis_agree, report.n_out_of_basis);
}

pub(crate) fn rate_and_qber_verdict(
    report: &VerificationReport,
    thresholds: &Thresholds,
    check_rate: bool,
) -> Verdict {
    if report.n_sent == 0 {
        return Verdict::Reject(RejectReason::EmptySession);
    }
    if check_rate {
        if report.detection_rate < thresholds.rate_floor * report.expected_rate {
            return Verdict::Reject(RejectReason::RateTooLow);
        }
        if report.detection_rate > thresholds.rate_ceiling * report.expected_rate {
            return Verdict::Reject(RejectReason::RateAnomaly);
        }
    }
    if report.n_matching_basis == 0 {
        return Verdict::Reject(RejectReason::NoEvidence);
    }
    if report.matching_qber > thresholds.qber_threshold {
        return Verdict::Reject(RejectReason::QberExceeded);
    }
    Verdict::Accept
}
