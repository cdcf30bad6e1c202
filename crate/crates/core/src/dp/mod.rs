//! Max-product dynamic programming over a [`Scorer`](crate::scorer::Scorer).

mod delta;
mod matrix;
mod oracle;
mod segment;
mod viterbi;

use std::collections::BTreeMap;

use serde::Serialize;

pub use delta::{delta_forward, delta_forward_with, DeltaTable};
pub(crate) use delta::{check_input, forward, relax, rescale, tie_argmax};
pub use matrix::{MaxPlusMatrix, SegmentMaxMatrix};
pub use oracle::{brute_force_oracle, ORACLE_GUARD};
pub use segment::{segment_max, segment_step_matrix};
pub use viterbi::{constrained_path, decode, path_score, viterbi_path};

use crate::weight::Weight;

/// How to choose among several maximizing paths.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Smallest path comparing `y₁` first.
    #[default]
    Lexicographic,
    /// Smallest path comparing `y_n` first (plain backpointer tracing).
    CoLexicographic,
    /// Prefer a maximizer through `state` at every listed time; fall back to
    /// lexicographic when no maximizer passes there.
    PiecewisePinned { state: usize, times: Vec<usize> },
}

/// Hard constraints `y_t = state`; times are 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pins(BTreeMap<usize, usize>);

impl Pins {
    pub fn new() -> Self {
        Pins::default()
    }

    /// Pins the first and/or last position of a length-`n` segment.
    pub fn endpoints(n: usize, start: Option<usize>, end: Option<usize>) -> Self {
        let mut p = Pins::new();
        if let Some(y) = start {
            p.pin(0, y);
        }
        if let Some(y) = end {
            p.pin(n - 1, y);
        }
        if let (Some(a), Some(b), 1) = (start, end, n) {
            if a != b {
                p.0.insert(0, usize::MAX);
            }
        }
        p
    }

    /// Adds a pin, replacing any earlier one at the same time.
    pub fn pin(&mut self, t: usize, state: usize) -> &mut Self {
        self.0.insert(t, state);
        self
    }

    pub fn with(mut self, t: usize, state: usize) -> Self {
        self.pin(t, state);
        self
    }

    pub fn get(&self, t: usize) -> Option<usize> {
        self.0.get(&t).copied()
    }

    pub fn allowed(&self, t: usize, y: usize) -> bool {
        self.0.get(&t).is_none_or(|&s| s == y)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&t, &s)| (t, s))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// No positive-probability path through 1-based time `t` (under the pins).
    ZeroLikelihood { t: usize },
    /// No maximizer passes the pinned state at the requested times.
    PinnedFallback { state: usize, times: Vec<usize> },
}

/// A decoded path with its score.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded<W> {
    /// Empty when no positive-probability path exists.
    pub path: Vec<usize>,
    /// Product of the kernel terms along `path` (times the initial density when included).
    pub score: W,
    /// Number of final states whose best score ties with the maximum.
    pub final_ties: usize,
    pub diagnostic: Option<Diagnostic>,
}

impl<W: Weight> Decoded<W> {
    pub fn log_likelihood(&self) -> f64 {
        self.score.ln()
    }

    pub fn is_zero(&self) -> bool {
        self.score.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOptions {
    pub tie: TieRule,
    pub include_initial: bool,
    /// Per-step rescaling; `None` uses the weight type's default.
    pub normalize: Option<bool>,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            tie: TieRule::Lexicographic,
            include_initial: true,
            normalize: None,
        }
    }
}
