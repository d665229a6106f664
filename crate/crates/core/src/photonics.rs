//! Source, channel and detector models for faint time-bin pulses.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, StateError};
use crate::qstate::{state_of, MeasBasis, QubitState, StateLabel};

/// Probability that a photon leaving the second interferometer lands in the
/// interfering (long-short + short-long) window.
pub const CENTRAL_WINDOW_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Attenuated laser: Poisson photon number with mean `mean_photons_mu`.
    #[default]
    WeakCoherent,
    /// Heralded single photons: exactly one photon per pulse.
    SinglePhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub mean_photons_mu: f64,
    pub pulse_rate: f64,
    pub session_duration: f64,
    #[serde(default)]
    pub kind: SourceKind,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self {
            mean_photons_mu: 0.2,
            pulse_rate: 1.0,
            session_duration: 10_000.0,
            kind: SourceKind::WeakCoherent,
        }
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<(), ConfigError> {
        non_negative("source.mean_photons_mu", self.mean_photons_mu)?;
        positive("source.pulse_rate", self.pulse_rate)?;
        // A zero-length session is allowed: it simply sends nothing.
        non_negative("source.session_duration", self.session_duration)
    }

    pub fn expected_pulses(&self) -> f64 {
        self.pulse_rate * self.session_duration
    }

    pub fn emit<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self.kind {
            SourceKind::WeakCoherent => sample_photon_number(self.mean_photons_mu, rng),
            SourceKind::SinglePhoton => 1,
        }
    }

    /// Probability that a pulse carries at least one photon past a channel of
    /// transmittance `eta`.
    pub fn nonempty_prob(&self, eta: f64) -> f64 {
        match self.kind {
            SourceKind::WeakCoherent => -libm::expm1(-self.mean_photons_mu * eta),
            SourceKind::SinglePhoton => eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub transmittance_eta: f64,
    pub qubit_error_e: f64,
    pub visibility_v: f64,
    pub detector_efficiency: f64,
    pub dark_count_prob: f64,
    /// Extra efficiency factor of Alice's receiver when set to the XY (index
    /// 0) or LR (index 1) basis. Unequal factors leak the commitment.
    #[serde(default = "unit_pair")]
    pub basis_efficiency: [f64; 2],
}

fn unit_pair() -> [f64; 2] {
    [1.0, 1.0]
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl ChannelModel {
    pub fn ideal() -> Self {
        Self {
            transmittance_eta: 1.0,
            qubit_error_e: 0.0,
            visibility_v: 1.0,
            detector_efficiency: 1.0,
            dark_count_prob: 0.0,
            basis_efficiency: unit_pair(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        probability("channel.transmittance_eta", self.transmittance_eta)?;
        probability("channel.qubit_error_e", self.qubit_error_e)?;
        probability("channel.visibility_v", self.visibility_v)?;
        probability("channel.detector_efficiency", self.detector_efficiency)?;
        probability("channel.dark_count_prob", self.dark_count_prob)?;
        probability("channel.basis_efficiency[0]", self.basis_efficiency[0])?;
        probability("channel.basis_efficiency[1]", self.basis_efficiency[1])
    }

    /// Overall per-photon detection efficiency of a receiver set to `basis`.
    pub fn efficiency_for(&self, basis: MeasBasis) -> f64 {
        let factor = match basis {
            MeasBasis::LR => self.basis_efficiency[1],
            _ => self.basis_efficiency[0],
        };
        self.detector_efficiency * factor
    }
}

pub(crate) fn probability(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::NotProbability { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Negative { field, value })
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}

/// What physically reaches Alice for one pulse. Carries quantum states only;
/// Bob's preparation labels never travel with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseArrival {
    pub pulse_id: u64,
    pub photons: Vec<QubitState>,
}

impl PulseArrival {
    pub fn photons_at_alice(&self) -> usize {
        self.photons.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UmziOutcome {
    Detector0,
    Detector1,
    SidePeak,
}

/// Poisson photon number of one weak coherent pulse. Panics if `mu` is
/// negative or not finite.
pub fn sample_photon_number<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u32 {
    if mu == 0.0 {
        return 0;
    }
    let poisson = Poisson::new(mu).expect("mean photon number must be finite and >= 0");
    let n: f64 = poisson.sample(rng);
    n as u32
}

/// Binomial thinning of `n` photons by transmittance `eta` in [0, 1].
pub fn transmit<R: Rng + ?Sized>(n: u32, eta: f64, rng: &mut R) -> u32 {
    if n == 0 || eta == 1.0 {
        return n;
    }
    let binomial = Binomial::new(u64::from(n), eta).expect("transmittance must lie in [0, 1]");
    binomial.sample(rng) as u32
}

/// Flips a BB84 label to its orthogonal partner with probability `e`.
pub fn apply_channel_error<R: Rng + ?Sized>(
    label: StateLabel,
    e: f64,
    rng: &mut R,
) -> Result<StateLabel, StateError> {
    if !label.is_bb84() {
        return Err(StateError::NotBb84(label));
    }
    if e > 0.0 && rng.random::<f64>() < e {
        Ok(label.orthogonal())
    } else {
        Ok(label)
    }
}

/// One photon through Alice's interferometer after Bob's.
///
/// Half the photons take the short-short or long-long path and fall in a side
/// peak. The rest interfere: detector 0 fires with probability
/// `(1 + v cos(phase_bob - phase_alice)) / 2`.
pub fn umzi_detect<R: Rng + ?Sized>(
    phase_bob: f64,
    phase_alice: f64,
    v: f64,
    rng: &mut R,
) -> UmziOutcome {
    if rng.random::<f64>() < 1.0 - CENTRAL_WINDOW_PROB {
        return UmziOutcome::SidePeak;
    }
    let p0 = 0.5 * (1.0 + v * libm::cos(phase_bob - phase_alice));
    if rng.random::<f64>() < p0 {
        UmziOutcome::Detector0
    } else {
        UmziOutcome::Detector1
    }
}

/// Threshold detector: true if any of `arrivals` photons is detected or a dark
/// count fires in the window.
pub fn detect<R: Rng + ?Sized>(
    arrivals: u32,
    detector_efficiency: f64,
    dark_count_prob: f64,
    rng: &mut R,
) -> bool {
    (0..arrivals).any(|_| rng.random::<f64>() < detector_efficiency)
        || rng.random::<f64>() < dark_count_prob
}

/// Honest time-bin reception of one pulse with Alice's interferometer set to
/// `basis` (XY or LR).
///
/// Photons are processed in arrival order and the first one detected in the
/// central window decides the outcome. If none is, a dark count may still
/// fire with a uniformly random outcome. Returns `None` when nothing clicks.
pub fn receive_time_bin<R: Rng + ?Sized>(
    photons: &[QubitState],
    basis: MeasBasis,
    channel: &ChannelModel,
    rng: &mut R,
) -> Option<StateLabel> {
    let analyzer = basis.analyzer_phase()?;
    let efficiency = channel.efficiency_for(basis);
    let [label0, label1] = basis.labels();
    for photon in photons {
        let contrast = channel.visibility_v * photon.time_bin_contrast();
        let outcome = umzi_detect(photon.time_bin_phase(), analyzer, contrast, rng);
        let label = match outcome {
            UmziOutcome::SidePeak => continue,
            UmziOutcome::Detector0 => label0,
            UmziOutcome::Detector1 => label1,
        };
        if rng.random::<f64>() < efficiency {
            return Some(label);
        }
    }
    if channel.dark_count_prob > 0.0 && rng.random::<f64>() < channel.dark_count_prob {
        return Some(if rng.random::<bool>() { label0 } else { label1 });
    }
    None
}

/// Sends one prepared pulse through the channel: photon number from the
/// source, loss, then an independent basis-preserving flip per photon.
pub fn propagate<R: Rng + ?Sized>(
    pulse_id: u64,
    label: StateLabel,
    source: &SourceModel,
    channel: &ChannelModel,
    rng: &mut R,
) -> Result<PulseArrival, StateError> {
    if !label.is_bb84() {
        return Err(StateError::NotBb84(label));
    }
    let emitted = source.emit(rng);
    let surviving = transmit(emitted, channel.transmittance_eta, rng);
    let photons = (0..surviving)
        .map(|_| apply_channel_error(label, channel.qubit_error_e, rng).map(state_of))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PulseArrival { pulse_id, photons })
}

/// Per-pulse announcement probability Bob expects from an honest Alice:
/// `(P(pulse non-empty after loss) · efficiency · 1/2)` plus dark counts on
/// the remaining windows.
pub fn expected_detection_rate(source: &SourceModel, channel: &ChannelModel) -> f64 {
    let signal = source.nonempty_prob(channel.transmittance_eta)
        * channel.detector_efficiency
        * CENTRAL_WINDOW_PROB;
    signal + (1.0 - signal) * channel.dark_count_prob
}
