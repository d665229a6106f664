//! Simulation configuration and its JSON file form.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qbc_core::adversary::AdversaryConfig;
use qbc_core::photonics::{ChannelModel, SourceKind, SourceModel};
use qbc_core::protocol::Thresholds;
use qbc_core::session::{ProtocolMode, SessionSetup};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub source: SourceModel,
    #[serde(default)]
    pub channel: ChannelModel,
    #[serde(default)]
    pub adversary: AdversaryConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub protocol_mode: ProtocolMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_trial")]
    pub trials: u64,
    /// Bit committed in every session; drawn per session from its stream when
    /// absent. In legacy mode this is Bob's bit.
    #[serde(default)]
    pub commit_bit: Option<u8>,
    /// Legacy mode only: Bob defers his choice with the storage model.
    #[serde(default)]
    pub bob_cheats: bool,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub parallelism: Option<usize>,
}

fn one_trial() -> u64 {
    1
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            source: SourceModel::default(),
            channel: ChannelModel::default(),
            adversary: AdversaryConfig::default(),
            thresholds: Thresholds::default(),
            protocol_mode: ProtocolMode::Primary,
            seed: 0,
            trials: 1,
            commit_bit: None,
            bob_cheats: false,
            parallelism: None,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| SimError::BadConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::BadConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.setup().validate()?;
        if self.trials == 0 {
            return Err(SimError::BadConfig("trials must be at least 1".into()));
        }
        if let Some(bit) = self.commit_bit {
            if bit > 1 {
                return Err(qbc_core::ConfigError::InvalidBit(bit).into());
            }
        }
        if self.parallelism == Some(0) {
            return Err(SimError::BadConfig("parallelism must be at least 1".into()));
        }
        Ok(())
    }

    pub fn setup(&self) -> SessionSetup {
        SessionSetup {
            source: self.source,
            channel: self.channel,
            adversary: self.adversary,
            thresholds: self.thresholds,
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Five sessions of 200 expected single-photon pulses at visibility 0.9,
    /// the shape of the reported toy experiment.
    pub fn fig2_preset() -> Self {
        Self {
            source: SourceModel {
                mean_photons_mu: 1.0,
                pulse_rate: 1.0,
                session_duration: 200.0,
                kind: SourceKind::SinglePhoton,
            },
            channel: ChannelModel { visibility_v: 0.9, ..ChannelModel::ideal() },
            trials: 5,
            ..Self::default()
        }
    }
}
