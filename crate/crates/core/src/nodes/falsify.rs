use rayon::prelude::*;
use serde::Serialize;

use crate::dp::{decode, viterbi_path, DecodeOptions, Pins, TieRule};
use crate::error::{Error, Result};
use crate::label;
use crate::scorer::{Observation, ObservationSpace, Scorer};
use crate::simulate::{CounterRng, Seed};
use crate::weight::Weight;

use super::detect_node;

/// What the embedded block must force.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FalsifyTarget {
    /// `None` accepts a node at any state.
    pub state: Option<usize>,
    pub strong: bool,
    /// Longest random prefix and suffix.
    pub max_flank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub observations: Vec<Observation>,
    #[serde(serialize_with = "label::one")]
    pub node_time: usize,
    pub order: usize,
    pub reason: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FalsifyOutcome {
    NoneFound { trials: u64 },
    Counterexample(Counterexample),
}

impl FalsifyOutcome {
    pub fn is_none_found(&self) -> bool {
        matches!(self, FalsifyOutcome::NoneFound { .. })
    }
}

fn draw<W: Weight>(weights: &[W], u: f64) -> Option<usize> {
    let best = W::max_of(weights.iter());
    if best.is_zero() {
        return None;
    }
    let p: Vec<f64> = weights.iter().map(|w| (w.ln() - best.ln()).exp()).collect();
    let total: f64 = p.iter().sum();
    let mut acc = 0.0;
    let target = u * total;
    for (i, v) in p.iter().enumerate() {
        acc += v;
        if target < acc {
            return Some(i);
        }
    }
    p.iter().rposition(|&v| v > 0.0)
}

/// Positive-probability prefix of length `len` drawn from the model's own law.
fn sample_prefix<S: Scorer + ?Sized>(model: &S, symbols: usize, len: usize, rng: &CounterRng, trial: u64) -> Vec<Observation> {
    let s = model.num_states();
    let mut out = Vec::with_capacity(len);
    let mut state = 0;
    for t in 0..len {
        let mut weights = Vec::with_capacity(symbols * s);
        for x in 0..symbols {
            let ox = Observation::Symbol(x);
            for y in 0..s {
                weights.push(if t == 0 {
                    model.initial(&ox, y)
                } else {
                    model.transition(&out[t - 1], state, &ox, y)
                });
            }
        }
        let u = rng.uniform(trial, 100 + t as u64);
        let Some(z) = draw(&weights, u) else { break };
        out.push(Observation::Symbol(z / s));
        state = z % s;
    }
    out
}

fn check_trial<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    order: usize,
    target: FalsifyTarget,
    symbols: usize,
    rng: &CounterRng,
    trial: u64,
) -> Result<Option<Counterexample>> {
    let m_len = block.len();
    let flank = target.max_flank as u64 + 1;
    let min_prefix = order.saturating_sub(m_len - 1);
    let want_prefix = min_prefix + rng.below(trial, 0, flank) as usize;
    let prefix = sample_prefix(model, symbols, want_prefix, rng, trial);
    if prefix.len() < min_prefix {
        return Ok(None);
    }
    let suffix_len = rng.below(trial, 1, flank) as usize;
    let mut seq = prefix;
    let start = seq.len();
    seq.extend_from_slice(block);
    for k in 0..suffix_len {
        seq.push(Observation::Symbol(rng.below(trial, 10_000 + k as u64, symbols as u64) as usize));
    }
    let m = start + m_len - 1;
    let t = m - order;
    let fail = |reason| Counterexample {
        trial,
        observations: seq.clone(),
        node_time: t,
        order,
        reason,
    };
    let report = detect_node(model, &seq[..=m], t)?;
    let states = if target.strong { &report.strong_states } else { &report.node_states };
    let state = match target.state {
        Some(c) if states.contains(&c) => c,
        Some(_) => return Ok(Some(fail("node inequality fails at the target state"))),
        None => match states.first() {
            Some(&c) => c,
            None => return Ok(Some(fail("no state satisfies the node inequality"))),
        },
    };
    let global = viterbi_path(model, &seq, &TieRule::Lexicographic)?;
    if global.is_zero() {
        return Ok(None);
    }
    let pinned = decode(model, &seq, &Pins::new().with(t, state), &DecodeOptions::default())?;
    if pinned.is_zero() || pinned.score.tie_cmp(&global.score) != std::cmp::Ordering::Equal {
        return Ok(Some(fail("no optimal continuation passes the node state")));
    }
    if target.strong {
        let colex = viterbi_path(model, &seq, &TieRule::CoLexicographic)?;
        if global.path[t] != state || colex.path[t] != state {
            return Ok(Some(fail("a tie-breaking rule avoids the strong node state")));
        }
    }
    Ok(None)
}

/// Embeds `block` after random positive-probability prefixes, appends random
/// suffixes, and checks that the block end minus `order` is a node whose state
/// some optimal path of the whole sequence passes. Returns the lowest-index failure.
pub fn falsify_barrier<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    order: usize,
    target: FalsifyTarget,
    trials: u64,
    seed: Seed,
) -> Result<FalsifyOutcome> {
    let ObservationSpace::Discrete { symbols } = model.observation_space() else {
        return Err(Error::Unsupported("falsification needs a discrete observation space".into()));
    };
    if trials == 0 || block.is_empty() {
        return Err(Error::InvalidArgument("need at least one trial and a non-empty block".into()));
    }
    model.check_observations(block)?;
    let rng = CounterRng::new(seed);
    let found = (0..trials)
        .into_par_iter()
        .map(|trial| check_trial(model, block, order, target, symbols, &rng, trial))
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(FalsifyOutcome::NoneFound { trials }),
        Some(Ok(Some(c))) => Ok(FalsifyOutcome::Counterexample(c)),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
    }
}
