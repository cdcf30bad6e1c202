use crate::error::{Error, Result};
use crate::scorer::{Observation, Scorer};
use crate::weight::Weight;

use super::{check_input, forward, rescale, tie_argmax, DecodeOptions, Decoded, Diagnostic, Pins, TieRule};

/// Product of the kernel terms along `path` (and the initial density when asked).
pub fn path_score<S: Scorer + ?Sized>(model: &S, obs: &[Observation], path: &[usize], include_initial: bool) -> S::W {
    let mut terms = Vec::with_capacity(path.len());
    if include_initial {
        terms.push(model.initial(&obs[0], path[0]));
    }
    for t in 1..path.len() {
        terms.push(model.transition(&obs[t - 1], path[t - 1], &obs[t], path[t]));
    }
    S::W::product(terms)
}

/// Unconstrained Viterbi path including the initial density.
pub fn viterbi_path<S: Scorer + ?Sized>(model: &S, obs: &[Observation], tie: &TieRule) -> Result<Decoded<S::W>> {
    decode(
        model,
        obs,
        &Pins::new(),
        &DecodeOptions {
            tie: tie.clone(),
            ..DecodeOptions::default()
        },
    )
}

/// Best path over a segment with optional endpoint pins.
pub fn constrained_path<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    start: Option<usize>,
    end: Option<usize>,
    include_initial: bool,
    tie: &TieRule,
) -> Result<Decoded<S::W>> {
    if obs.is_empty() {
        return Err(Error::InvalidArgument("observation segment is empty".into()));
    }
    decode(
        model,
        obs,
        &Pins::endpoints(obs.len(), start, end),
        &DecodeOptions {
            tie: tie.clone(),
            include_initial,
            normalize: None,
        },
    )
}

/// Maximizes the path score subject to `pins`, breaking ties per `opts.tie`.
pub fn decode<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    pins: &Pins,
    opts: &DecodeOptions,
) -> Result<Decoded<S::W>> {
    check_input(model, obs)?;
    let s = model.num_states();
    for (t, y) in pins.iter() {
        if t >= obs.len() || (y >= s && y != usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "pin y_{} = {} outside the segment or state space",
                t + 1,
                y.saturating_add(1)
            )));
        }
    }
    let normalize = opts.normalize.unwrap_or(S::W::NORMALIZE);
    match &opts.tie {
        TieRule::CoLexicographic => Ok(colex(model, obs, pins, opts.include_initial, normalize)),
        TieRule::Lexicographic => Ok(lex(model, obs, pins, opts.include_initial, normalize)),
        TieRule::PiecewisePinned { state, times } => {
            if *state >= s || times.iter().any(|&t| t >= obs.len()) {
                return Err(Error::InvalidArgument("piecewise pin outside the segment or state space".into()));
            }
            let global = lex(model, obs, pins, opts.include_initial, normalize);
            let mut pinned_pins = pins.clone();
            let mut conflict = false;
            for &t in times {
                if pins.get(t).is_some_and(|y| y != *state) {
                    conflict = true;
                }
                pinned_pins.pin(t, *state);
            }
            if !conflict && !global.is_zero() {
                let pinned = lex(model, obs, &pinned_pins, opts.include_initial, normalize);
                if !pinned.is_zero() && pinned.score.tie_cmp(&global.score) == std::cmp::Ordering::Equal {
                    return Ok(Decoded {
                        final_ties: global.final_ties,
                        ..pinned
                    });
                }
            }
            if global.is_zero() {
                return Ok(global);
            }
            Ok(Decoded {
                diagnostic: Some(Diagnostic::PinnedFallback {
                    state: *state,
                    times: times.clone(),
                }),
                ..global
            })
        }
    }
}

fn zero_result<W: Weight>(t: usize) -> Decoded<W> {
    Decoded {
        path: Vec::new(),
        score: W::zero(),
        final_ties: 0,
        diagnostic: Some(Diagnostic::ZeroLikelihood { t: t + 1 }),
    }
}

fn colex<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    pins: &Pins,
    include_initial: bool,
    normalize: bool,
) -> Decoded<S::W> {
    let table = forward(model, obs, pins, include_initial, normalize);
    let (best, ties) = table.final_argmax();
    if best.is_zero() {
        return zero_result(table.zero_likelihood_from().unwrap_or(obs.len() - 1));
    }
    let n = obs.len();
    let mut path = vec![0; n];
    path[n - 1] = ties[0];
    for t in (1..n).rev() {
        path[t - 1] = table.backpointer(t, path[t]);
    }
    Decoded {
        score: path_score(model, obs, &path, include_initial),
        path,
        final_ties: ties.len(),
        diagnostic: None,
    }
}

fn lex<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    pins: &Pins,
    include_initial: bool,
    normalize: bool,
) -> Decoded<S::W> {
    let s = model.num_states();
    let n = obs.len();
    let table = forward(model, obs, pins, include_initial, normalize);
    let (best, ties) = table.final_argmax();
    if best.is_zero() {
        return zero_result(table.zero_likelihood_from().unwrap_or(n - 1));
    }
    // β_t(y): best continuation score from (t, y) to the end, respecting pins.
    let mut beta: Vec<S::W> = vec![S::W::zero(); n * s];
    for y in 0..s {
        if pins.allowed(n - 1, y) {
            beta[(n - 1) * s + y] = S::W::one();
        }
    }
    for t in (0..n - 1).rev() {
        let w = model.step_weights(&obs[t], &obs[t + 1]);
        let (head, tail) = beta.split_at_mut((t + 1) * s);
        let next = &tail[..s];
        let col = &mut head[t * s..];
        for y in 0..s {
            if !pins.allowed(t, y) {
                continue;
            }
            let mut m = S::W::zero();
            for (yn, b) in next.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let v = w[y * s + yn].times(b);
                if v.exact_cmp(&m) == std::cmp::Ordering::Greater {
                    m = v;
                }
            }
            col[y] = m;
        }
        rescale(col, normalize);
    }
    let mut path = Vec::with_capacity(n);
    let first: Vec<S::W> = (0..s)
        .map(|y| {
            let b = &beta[y];
            if b.is_zero() {
                S::W::zero()
            } else if include_initial {
                model.initial(&obs[0], y).times(b)
            } else {
                b.clone()
            }
        })
        .collect();
    path.push(tie_argmax(&first).1);
    for t in 0..n - 1 {
        let cur = path[t];
        let cand: Vec<S::W> = (0..s)
            .map(|y| {
                let b = &beta[(t + 1) * s + y];
                if b.is_zero() {
                    S::W::zero()
                } else {
                    model.transition(&obs[t], cur, &obs[t + 1], y).times(b)
                }
            })
            .collect();
        path.push(tie_argmax(&cand).1);
    }
    Decoded {
        score: path_score(model, obs, &path, include_initial),
        path,
        final_ties: ties.len(),
        diagnostic: None,
    }
}
