//! Pairwise Markov models: simulation, Viterbi decoding, node and barrier
//! detection, online decoding with prefix commitment, and checks of the
//! sufficient conditions for an infinite Viterbi path.

pub mod canonical;
pub mod cli;
pub mod conditions;
pub mod dp;
pub mod error;
pub mod experiments;
pub mod io;
mod label;
pub mod nodes;
pub mod online;
pub mod model;
pub mod prob;
pub mod scorer;
pub mod simulate;
pub mod weight;

pub use dp::{
    brute_force_oracle, constrained_path, decode, delta_forward, segment_max, viterbi_path, DecodeOptions, Decoded,
    DeltaTable, Diagnostic, MaxPlusMatrix, Pins, SegmentMaxMatrix, TieRule,
};
pub use error::{Error, Result};
pub use model::{kernel_log_density, load_model, load_model_file, ModelKind, ModelSpec};
pub use scorer::{symbols, symbols_1based, Observation, ObservationSpace, Scorer};
pub use simulate::{simulate, Seed, Trajectory};
pub use weight::{Exact, LogWeight, Weight};
