//! Cheating strategies for a committer who wants to postpone her choice.
//!
//! None of these ever sees Bob's preparation labels: they work only on the
//! [`PulseArrival`]s that physically reach Alice, and each announced pulse is
//! backed by a [`CheatEntry`] from which an opening in either basis can be
//! produced later.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ProtocolError, StateError};
use crate::photonics::{self, expected_detection_rate, ChannelModel, PulseArrival, SourceModel};
use crate::protocol::{Announcement, OpeningRecord};
use crate::qstate::{breidbart_error, measure, MeasBasis, QubitState, StateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Honest,
    /// Measure single photons in a random intermediate basis.
    Breidbart,
    /// Announce only multi-photon pulses, measuring one photon per basis.
    PairSplit,
    /// Nondemolition arrival detection followed by qubit storage.
    Delayed,
    /// All pairs plus enough Breidbart singles to meet Bob's rate floor.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub strategy: Strategy,
    /// Success probability of the nondemolition arrival-time measurement.
    #[serde(default)]
    pub qnd_success_q: f64,
    /// Probability a stored qubit is read back without a flip.
    #[serde(default = "one")]
    pub storage_fidelity_f: f64,
    #[serde(default = "yes")]
    pub exploit_pairs: bool,
    /// Synthetic pair fraction for [`Strategy::Combined`]. When set, the
    /// announcement is composed to hit this fraction and the rate budget is
    /// ignored.
    #[serde(default)]
    pub forced_p2: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Honest,
            qnd_success_q: 0.0,
            storage_fidelity_f: 1.0,
            exploit_pairs: true,
            forced_p2: None,
        }
    }
}

impl AdversaryConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        photonics::probability("adversary.qnd_success_q", self.qnd_success_q)?;
        photonics::probability("adversary.storage_fidelity_f", self.storage_fidelity_f)?;
        if let Some(p2) = self.forced_p2 {
            photonics::probability("adversary.forced_p2", p2)?;
        }
        Ok(())
    }

    pub fn is_honest(&self) -> bool {
        self.strategy == Strategy::Honest
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    BreidbartB1,
    BreidbartB2,
    PairBothBases,
    StoredQubit,
}

/// What the cheater holds for one announced pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CheatEntry {
    /// Outcome of a B1 or B2 measurement.
    Breidbart(StateLabel),
    PairBothBases { xy: StateLabel, lr: StateLabel },
    StoredQubit { state: QubitState, fidelity: f64 },
}

impl CheatEntry {
    pub fn provenance(&self) -> Provenance {
        match self {
            CheatEntry::Breidbart(label) if label.basis() == MeasBasis::B1 => Provenance::BreidbartB1,
            CheatEntry::Breidbart(_) => Provenance::BreidbartB2,
            CheatEntry::PairBothBases { .. } => Provenance::PairBothBases,
            CheatEntry::StoredQubit { .. } => Provenance::StoredQubit,
        }
    }

    /// The label claimed for this pulse when opening in `basis` (XY or LR).
    pub fn reveal<R: Rng + ?Sized>(
        &self,
        basis: MeasBasis,
        rng: &mut R,
    ) -> Result<StateLabel, StateError> {
        match *self {
            CheatEntry::Breidbart(outcome) => Ok(breidbart_claim(outcome, basis)),
            CheatEntry::PairBothBases { xy, lr } => Ok(if basis == MeasBasis::LR { lr } else { xy }),
            CheatEntry::StoredQubit { state, fidelity } => {
                let label = measure(&state, basis, rng)?;
                if fidelity < 1.0 && rng.random::<f64>() >= fidelity {
                    Ok(label.orthogonal())
                } else {
                    Ok(label)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheatOutcomeStore {
    pub entries: BTreeMap<u64, CheatEntry>,
}

impl CheatOutcomeStore {
    pub fn announcement(&self) -> Announcement {
        Announcement { detected_pulse_ids: self.entries.keys().copied().collect() }
    }

    pub fn count(&self, provenance: Provenance) -> usize {
        self.entries.values().filter(|e| e.provenance() == provenance).count()
    }

    /// Opens to `bit`, whichever bit that is.
    pub fn open<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> Result<OpeningRecord, ProtocolError> {
        let basis = MeasBasis::for_bit(bit).ok_or(ConfigError::InvalidBit(bit))?;
        let outcomes = self
            .entries
            .iter()
            .map(|(&id, entry)| entry.reveal(basis, rng).map(|label| (id, label)))
            .collect::<Result<_, _>>()?;
        Ok(OpeningRecord { commitment_bit: bit, basis, outcomes })
    }
}

/// Result of a cheating commit phase.
#[derive(Debug, Clone, PartialEq)]
pub struct CheatCommit {
    pub announcement: Announcement,
    pub store: CheatOutcomeStore,
    /// Fraction of announced pulses backed by a pair measurement.
    pub realized_p2: f64,
    pub n_pairs: u64,
}

impl CheatCommit {
    fn from_store(store: CheatOutcomeStore) -> Self {
        let n_pairs = store.count(Provenance::PairBothBases) as u64;
        let n = store.entries.len() as u64;
        let realized_p2 = if n == 0 { 0.0 } else { n_pairs as f64 / n as f64 };
        Self { announcement: store.announcement(), store, realized_p2, n_pairs }
    }
}

/// Claimed label for a Breidbart outcome when opening in `basis`: the basis
/// vector with squared overlap cos²(π/8).
pub fn breidbart_claim(outcome: StateLabel, basis: MeasBasis) -> StateLabel {
    let lr = basis == MeasBasis::LR;
    match outcome {
        StateLabel::V1 => if lr { StateLabel::R } else { StateLabel::Y },
        StateLabel::U1 => if lr { StateLabel::L } else { StateLabel::X },
        StateLabel::V2 => if lr { StateLabel::L } else { StateLabel::Y },
        StateLabel::U2 => if lr { StateLabel::R } else { StateLabel::X },
        // A BB84 outcome already is a claim.
        other => other,
    }
}

/// Measures a single photon in B1 or B2 (uniformly chosen) and keeps the
/// outcome.
pub fn breidbart_measure_and_store<R: Rng + ?Sized>(
    state: &QubitState,
    rng: &mut R,
) -> Result<CheatEntry, StateError> {
    let basis = MeasBasis::BREIDBART[usize::from(rng.random::<bool>())];
    measure(state, basis, rng).map(CheatEntry::Breidbart)
}

/// Splits a multi-photon pulse: the first photon is measured in XY, the
/// second in LR, any others are ignored.
pub fn pair_split_measure<R: Rng + ?Sized>(
    photons: &[QubitState],
    rng: &mut R,
) -> Result<CheatEntry, ProtocolError> {
    match photons {
        [first, second, ..] => Ok(CheatEntry::PairBothBases {
            xy: measure(first, MeasBasis::XY, rng)?,
            lr: measure(second, MeasBasis::LR, rng)?,
        }),
        _ => Err(ProtocolError::NotAPair(photons.len())),
    }
}

/// Nondemolition capture: with probability `q` the photon's arrival is seen
/// and its qubit stored with read-out fidelity `f`; otherwise it is lost.
pub fn delayed_measure<R: Rng + ?Sized>(
    state: &QubitState,
    q: f64,
    f: f64,
    rng: &mut R,
) -> Option<CheatEntry> {
    (q > 0.0 && rng.random::<f64>() < q).then_some(CheatEntry::StoredQubit { state: *state, fidelity: f })
}

/// Smallest announcement count that keeps the detection rate at
/// `rate_floor` times the honest expectation for this source and channel.
pub fn rate_budget(source: &SourceModel, channel: &ChannelModel, rate_floor: f64) -> u64 {
    let expected = source.expected_pulses() * expected_detection_rate(source, channel);
    libm::ceil(expected * rate_floor) as u64
}

/// Expected matching-basis error of a pair/Breidbart mixture with pair
/// fraction `p2` and channel flip probability `e`.
pub fn expected_cheat_qber(p2: f64, e: f64) -> f64 {
    let s2 = breidbart_error();
    (1.0 - p2) * (s2 + e * (1.0 - 2.0 * s2)) + p2 * e
}

fn choose<R: Rng + ?Sized, T: Copy>(pool: &[T], amount: usize, rng: &mut R) -> Vec<T> {
    let amount = amount.min(pool.len());
    let mut picked = index::sample(rng, pool.len(), amount).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| pool[i]).collect()
}

/// Announce every pair (one photon per basis), then Breidbart-measure
/// randomly chosen singles until `budget` announcements are reached.
pub fn combined_strategy<R: Rng + ?Sized>(
    arrivals: &[PulseArrival],
    config: &AdversaryConfig,
    budget: u64,
    rng: &mut R,
) -> Result<CheatCommit, ProtocolError> {
    let (pairs, singles): (Vec<&PulseArrival>, Vec<&PulseArrival>) = arrivals
        .iter()
        .filter(|a| !a.photons.is_empty())
        .partition(|a| config.exploit_pairs && a.photons.len() >= 2);

    let (pairs, singles) = match config.forced_p2 {
        Some(p2) => forced_composition(&pairs, &singles, p2, rng),
        None => {
            let fill = (budget as usize).saturating_sub(pairs.len());
            let singles = choose(&singles, fill, rng);
            (pairs, singles)
        }
    };

    let mut store = CheatOutcomeStore::default();
    for arrival in pairs {
        store.entries.insert(arrival.pulse_id, pair_split_measure(&arrival.photons, rng)?);
    }
    for arrival in singles {
        store.entries.insert(arrival.pulse_id, breidbart_measure_and_store(&arrival.photons[0], rng)?);
    }
    Ok(CheatCommit::from_store(store))
}

/// Largest announcement with pair fraction `p2` drawn from the two pools.
fn forced_composition<'a, R: Rng + ?Sized>(
    pairs: &[&'a PulseArrival],
    singles: &[&'a PulseArrival],
    p2: f64,
    rng: &mut R,
) -> (Vec<&'a PulseArrival>, Vec<&'a PulseArrival>) {
    let (n_pairs, n_singles) = if p2 <= 0.0 {
        (0, singles.len())
    } else if p2 >= 1.0 {
        (pairs.len(), 0)
    } else {
        let total = (pairs.len() as f64 / p2).min(singles.len() as f64 / (1.0 - p2));
        let total = libm::floor(total) as usize;
        let k = (libm::round(p2 * total as f64) as usize).min(pairs.len());
        (k, (total - k).min(singles.len()))
    };
    (choose(pairs, n_pairs, rng), choose(singles, n_singles, rng))
}

/// Breidbart-only cheat, announcing `budget` randomly chosen non-empty pulses.
pub fn breidbart_strategy<R: Rng + ?Sized>(
    arrivals: &[PulseArrival],
    budget: u64,
    rng: &mut R,
) -> Result<CheatCommit, ProtocolError> {
    let candidates: Vec<&PulseArrival> = arrivals.iter().filter(|a| !a.photons.is_empty()).collect();
    let mut store = CheatOutcomeStore::default();
    for arrival in choose(&candidates, budget as usize, rng) {
        store.entries.insert(arrival.pulse_id, breidbart_measure_and_store(&arrival.photons[0], rng)?);
    }
    Ok(CheatCommit::from_store(store))
}

/// Pair splitting alone: only multi-photon pulses are announced.
pub fn pair_split_strategy<R: Rng + ?Sized>(
    arrivals: &[PulseArrival],
    config: &AdversaryConfig,
    rng: &mut R,
) -> Result<CheatCommit, ProtocolError> {
    let mut store = CheatOutcomeStore::default();
    if config.exploit_pairs {
        for arrival in arrivals.iter().filter(|a| a.photons.len() >= 2) {
            store.entries.insert(arrival.pulse_id, pair_split_measure(&arrival.photons, rng)?);
        }
    }
    Ok(CheatCommit::from_store(store))
}

/// Store every photon the nondemolition measurement catches, then announce at
/// most `budget` of them so the rate looks honest.
pub fn delayed_strategy<R: Rng + ?Sized>(
    arrivals: &[PulseArrival],
    config: &AdversaryConfig,
    budget: u64,
    rng: &mut R,
) -> CheatCommit {
    let captured: Vec<(u64, CheatEntry)> = arrivals
        .iter()
        .filter_map(|a| {
            let photon = a.photons.first()?;
            delayed_measure(photon, config.qnd_success_q, config.storage_fidelity_f, rng)
                .map(|entry| (a.pulse_id, entry))
        })
        .collect();
    let store = CheatOutcomeStore { entries: choose(&captured, budget as usize, rng).into_iter().collect() };
    CheatCommit::from_store(store)
}

/// Runs the configured cheating commit phase. Returns `None` for
/// [`Strategy::Honest`].
///
/// Breidbart and Delayed aim at the full honest rate; Combined aims at the
/// rate floor, which is the least a cheater must announce.
pub fn cheat_commit<R: Rng + ?Sized>(
    arrivals: &[PulseArrival],
    config: &AdversaryConfig,
    source: &SourceModel,
    channel: &ChannelModel,
    rate_floor: f64,
    rng: &mut R,
) -> Result<Option<CheatCommit>, ProtocolError> {
    let full = || rate_budget(source, channel, 1.0);
    let commit = match config.strategy {
        Strategy::Honest => return Ok(None),
        Strategy::Breidbart => breidbart_strategy(arrivals, full(), rng)?,
        Strategy::PairSplit => pair_split_strategy(arrivals, config, rng)?,
        Strategy::Delayed => delayed_strategy(arrivals, config, full(), rng),
        Strategy::Combined => {
            combined_strategy(arrivals, config, rate_budget(source, channel, rate_floor), rng)?
        }
    };
    Ok(Some(commit))
}
