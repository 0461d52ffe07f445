//! Checkpoints: a flat little-endian `f64` blob (`params ++ adam_m ++ adam_v`)
//! and a JSON sidecar at `<blob>.json` with shapes, config, step and RNG
//! positions.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use super::train::{Rngs, TrainConfig, TrainState};
use crate::error::{Error, Result};

pub const FORMAT: &str = "snrforge-checkpoint-v1";
const SECTIONS: [&str; 3] = ["params", "adam_m", "adam_v"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

/// ChaCha word positions as decimal strings (they are `u128`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngPositions {
    pub data: String,
    pub time: String,
    pub noise: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format: String,
    pub step: u64,
    pub config: TrainConfig,
    pub n_params: usize,
    pub sections: Vec<String>,
    pub layers: Vec<LayerRecord>,
    pub rng: RngPositions,
}

pub fn sidecar_path(blob: &Path) -> PathBuf {
    let mut s = blob.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

impl Sidecar {
    fn of(state: &TrainState) -> Self {
        Sidecar {
            format: FORMAT.into(),
            step: state.step,
            config: state.config.clone(),
            n_params: state.params.len(),
            sections: SECTIONS.iter().map(|s| s.to_string()).collect(),
            layers: state
                .config
                .shape
                .layers()
                .iter()
                .map(|l| LayerRecord { name: l.name.into(), rows: l.rows, cols: l.cols })
                .collect(),
            rng: RngPositions {
                data: state.rngs.data.get_word_pos().to_string(),
                time: state.rngs.time.get_word_pos().to_string(),
                noise: state.rngs.noise.get_word_pos().to_string(),
            },
        }
    }

    pub fn read(blob: &Path) -> Result<Self> {
        let text = fs::read_to_string(sidecar_path(blob))?;
        let side: Sidecar = serde_json::from_str(&text)?;
        if side.format != FORMAT {
            return Err(Error::Checkpoint(format!("unknown format `{}`", side.format)));
        }
        side.config.validate()?;
        Ok(side)
    }
}

pub fn save(state: &TrainState, blob: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(24 * state.params.len());
    for v in state.params.iter().chain(&state.adam_m).chain(&state.adam_v) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(blob, bytes)?;
    fs::write(sidecar_path(blob), serde_json::to_string_pretty(&Sidecar::of(state))?)?;
    Ok(())
}

fn word_pos(s: &str) -> Result<u128> {
    s.parse().map_err(|_| Error::Checkpoint(format!("bad RNG position `{s}`")))
}

pub fn load(blob: &Path) -> Result<TrainState> {
    let side = Sidecar::read(blob)?;
    let n = side.config.shape.n_params();
    if side.n_params != n {
        return Err(Error::Checkpoint(format!("sidecar says {} params, shape implies {n}", side.n_params)));
    }
    let bytes = fs::read(blob)?;
    if bytes.len() != 24 * n {
        return Err(Error::Checkpoint(format!("blob has {} bytes, expected {}", bytes.len(), 24 * n)));
    }
    let mut values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut take = |k| values.by_ref().take(k).collect::<Vec<_>>();
    let (params, adam_m, adam_v) = (take(n), take(n), take(n));
    let mut rngs = Rngs::new(side.config.seed);
    rngs.data.set_word_pos(word_pos(&side.rng.data)?);
    rngs.time.set_word_pos(word_pos(&side.rng.time)?);
    rngs.noise.set_word_pos(word_pos(&side.rng.noise)?);
    Ok(TrainState { config: side.config, params, adam_m, adam_v, step: side.step, rngs })
}
