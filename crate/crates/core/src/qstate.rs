//! Two-level state arithmetic in the time-bin basis.
//!
//! Every state is stored as amplitudes on the short-arm bin `|A⟩` and the
//! long-arm bin `|B⟩`. The four BB84 states are equal superpositions with
//! relative phases 0, π, π/2 and 3π/2; the four Breidbart states sit halfway
//! between the two BB84 bases and are built from `|X⟩` and `|Y⟩`.

use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::StateError;

/// Norm tolerance for caller-supplied states.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-9;

/// sin²(π/8), the error a Breidbart measurement leaves in either BB84 basis.
pub fn breidbart_error() -> f64 {
    let s = libm::sin(FRAC_PI_8);
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub amp_a: Complex64,
    pub amp_b: Complex64,
}

impl QubitState {
    /// Builds a state, rejecting amplitudes whose squared norm is off by more
    /// than [`INPUT_NORM_TOLERANCE`].
    pub fn new(amp_a: Complex64, amp_b: Complex64) -> Result<Self, StateError> {
        let state = Self { amp_a, amp_b };
        state.check_normalized()?;
        Ok(state)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_a.norm_sqr() + self.amp_b.norm_sqr()
    }

    pub fn check_normalized(&self) -> Result<(), StateError> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > INPUT_NORM_TOLERANCE || !norm_sqr.is_finite() {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp_a.conj() * other.amp_a + self.amp_b.conj() * other.amp_b
    }

    fn combine(c1: Complex64, s1: &QubitState, c2: Complex64, s2: &QubitState) -> QubitState {
        QubitState {
            amp_a: c1 * s1.amp_a + c2 * s2.amp_a,
            amp_b: c1 * s1.amp_b + c2 * s2.amp_b,
        }
    }

    /// Relative phase of the long bin against the short bin, in (-π, π].
    pub fn time_bin_phase(&self) -> f64 {
        let rel = self.amp_a.conj() * self.amp_b;
        libm::atan2(rel.im, rel.re)
    }

    /// Fringe contrast `2|a||b|` this state can reach in a two-bin
    /// interference measurement; 1 for the BB84 states.
    pub fn time_bin_contrast(&self) -> f64 {
        2.0 * libm::sqrt(self.amp_a.norm_sqr() * self.amp_b.norm_sqr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    X,
    Y,
    L,
    R,
    V1,
    U1,
    V2,
    U2,
}

impl StateLabel {
    pub const BB84: [StateLabel; 4] = [StateLabel::X, StateLabel::Y, StateLabel::L, StateLabel::R];
    pub const BREIDBART: [StateLabel; 4] =
        [StateLabel::V1, StateLabel::U1, StateLabel::V2, StateLabel::U2];
    pub const ALL: [StateLabel; 8] = [
        StateLabel::X,
        StateLabel::Y,
        StateLabel::L,
        StateLabel::R,
        StateLabel::V1,
        StateLabel::U1,
        StateLabel::V2,
        StateLabel::U2,
    ];

    pub fn is_bb84(self) -> bool {
        matches!(self, StateLabel::X | StateLabel::Y | StateLabel::L | StateLabel::R)
    }

    pub fn basis(self) -> MeasBasis {
        match self {
            StateLabel::X | StateLabel::Y => MeasBasis::XY,
            StateLabel::L | StateLabel::R => MeasBasis::LR,
            StateLabel::V1 | StateLabel::U1 => MeasBasis::B1,
            StateLabel::V2 | StateLabel::U2 => MeasBasis::B2,
        }
    }

    /// The other vector of the same basis.
    pub fn orthogonal(self) -> StateLabel {
        let [first, second] = self.basis().labels();
        if self == first {
            second
        } else {
            first
        }
    }

    /// Index of this label within its basis; for the BB84 bases this is the
    /// detector that fires (X, L → 0; Y, R → 1).
    pub fn bit_value(self) -> u8 {
        if self == self.basis().labels()[0] {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeasBasis {
    XY,
    LR,
    B1,
    B2,
}

impl MeasBasis {
    pub const COMMITMENT: [MeasBasis; 2] = [MeasBasis::XY, MeasBasis::LR];
    pub const BREIDBART: [MeasBasis; 2] = [MeasBasis::B1, MeasBasis::B2];

    pub fn labels(self) -> [StateLabel; 2] {
        match self {
            MeasBasis::XY => [StateLabel::X, StateLabel::Y],
            MeasBasis::LR => [StateLabel::L, StateLabel::R],
            MeasBasis::B1 => [StateLabel::V1, StateLabel::U1],
            MeasBasis::B2 => [StateLabel::V2, StateLabel::U2],
        }
    }

    /// Commitment convention: bit 0 ↔ XY, bit 1 ↔ LR.
    pub fn for_bit(bit: u8) -> Option<MeasBasis> {
        match bit {
            0 => Some(MeasBasis::XY),
            1 => Some(MeasBasis::LR),
            _ => None,
        }
    }

    pub fn commitment_bit(self) -> Option<u8> {
        match self {
            MeasBasis::XY => Some(0),
            MeasBasis::LR => Some(1),
            _ => None,
        }
    }

    /// Phase setting of Alice's interferometer for a BB84 basis.
    pub fn analyzer_phase(self) -> Option<f64> {
        match self {
            MeasBasis::XY => Some(0.0),
            MeasBasis::LR => Some(core::f64::consts::FRAC_PI_2),
            _ => None,
        }
    }

    pub fn contains(self, label: StateLabel) -> bool {
        label.basis() == self
    }
}

pub fn state_of(label: StateLabel) -> QubitState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let x = QubitState { amp_a: h, amp_b: h };
    let y = QubitState { amp_a: h, amp_b: -h };
    let s = Complex64::new(libm::sin(FRAC_PI_8), 0.0);
    let c = Complex64::new(libm::cos(FRAC_PI_8), 0.0);
    match label {
        StateLabel::X => x,
        StateLabel::Y => y,
        StateLabel::L => QubitState { amp_a: h, amp_b: i * h },
        StateLabel::R => QubitState { amp_a: h, amp_b: -i * h },
        // |V1⟩ = sin(π/8)|X⟩ + i cos(π/8)|Y⟩, |U1⟩ = cos(π/8)|X⟩ − i sin(π/8)|Y⟩
        StateLabel::V1 => QubitState::combine(s * one, &x, i * c, &y),
        StateLabel::U1 => QubitState::combine(c * one, &x, -i * s, &y),
        // |V2⟩ = sin(π/8)|X⟩ − i cos(π/8)|Y⟩, |U2⟩ = cos(π/8)|X⟩ + i sin(π/8)|Y⟩
        StateLabel::V2 => QubitState::combine(s * one, &x, -i * c, &y),
        StateLabel::U2 => QubitState::combine(c * one, &x, i * s, &y),
    }
}

/// |⟨s|t⟩|² for two normalized states.
pub fn overlap_prob(s: &QubitState, t: &QubitState) -> Result<f64, StateError> {
    s.check_normalized()?;
    t.check_normalized()?;
    Ok(s.inner(t).norm_sqr().clamp(0.0, 1.0))
}

/// Born probabilities of the two outcomes of `basis`, in `basis.labels()` order.
pub fn outcome_probs(s: &QubitState, basis: MeasBasis) -> Result<[f64; 2], StateError> {
    let [first, second] = basis.labels();
    Ok([overlap_prob(s, &state_of(first))?, overlap_prob(s, &state_of(second))?])
}

/// Projective (demolition) measurement of `s` in `basis`.
pub fn measure<R: Rng + ?Sized>(
    s: &QubitState,
    basis: MeasBasis,
    rng: &mut R,
) -> Result<StateLabel, StateError> {
    let [p_first, p_second] = outcome_probs(s, basis)?;
    let [first, second] = basis.labels();
    let u: f64 = rng.random::<f64>() * (p_first + p_second);
    Ok(if u < p_first { first } else { second })
}
