use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scorer::{Observation, Scorer};
use crate::weight::{NeumaierSum, Weight};

use super::Pins;

/// Forward max-product scores with co-lexicographic backpointers.
///
/// Column `t` is stored divided by `scale(0)·…·scale(t)`; with normalization
/// off every scale is one.
#[derive(Clone, Debug)]
pub struct DeltaTable<W> {
    states: usize,
    delta: Vec<W>,
    back: Vec<u32>,
    scale: Vec<W>,
    zero_from: Option<usize>,
}

impl<W: Weight> DeltaTable<W> {
    pub fn len(&self) -> usize {
        self.scale.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scale.is_empty()
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn normalized(&self, t: usize) -> &[W] {
        &self.delta[t * self.states..(t + 1) * self.states]
    }

    /// Smallest-label maximizer `y'` of `δ_{t-1}(y')·q(x_t, y | x_{t-1}, y')`; `t ≥ 1`.
    pub fn backpointer(&self, t: usize, y: usize) -> usize {
        self.back[t * self.states + y] as usize
    }

    pub fn scale(&self, t: usize) -> &W {
        &self.scale[t]
    }

    /// `ln(scale(0)·…·scale(t))`, compensated.
    pub fn log_offset(&self, t: usize) -> f64 {
        let mut s = NeumaierSum::default();
        for w in &self.scale[..=t] {
            s.add(w.ln());
        }
        s.total()
    }

    /// `δ_t(y)` without normalization.
    pub fn unnormalized(&self, t: usize, y: usize) -> W {
        let mut w = self.normalized(t)[y].clone();
        for s in &self.scale[..=t] {
            w = w.times(s);
        }
        w
    }

    pub fn log_delta(&self, t: usize, y: usize) -> f64 {
        let v = &self.normalized(t)[y];
        if v.is_zero() {
            f64::NEG_INFINITY
        } else {
            v.ln() + self.log_offset(t)
        }
    }

    /// First 0-based time whose column is identically zero.
    pub fn zero_likelihood_from(&self) -> Option<usize> {
        self.zero_from
    }

    /// Maximal final value (normalized) and the states within tie tolerance of it.
    pub fn final_argmax(&self) -> (W, Vec<usize>) {
        let last = self.normalized(self.len() - 1);
        let best = W::max_of(last);
        let ties = if best.is_zero() {
            Vec::new()
        } else {
            (0..self.states).filter(|&y| last[y].tie_cmp(&best) == Ordering::Equal).collect()
        };
        (best, ties)
    }
}

/// Max-product relaxation of one step: returns `max_{y'} prev(y')·w[y'][y]`
/// and the smallest tie-maximizing `y'` for every `y`.
pub(crate) fn relax<W: Weight>(prev: &[W], w: &[W], s: usize) -> (Vec<W>, Vec<u32>) {
    let mut out = Vec::with_capacity(s);
    let mut back = Vec::with_capacity(s);
    let mut cand = Vec::with_capacity(s);
    for y in 0..s {
        cand.clear();
        for (yp, p) in prev.iter().enumerate() {
            cand.push(if p.is_zero() { W::zero() } else { p.times(&w[yp * s + y]) });
        }
        let (best, arg) = tie_argmax(&cand);
        out.push(best);
        back.push(arg as u32);
    }
    (out, back)
}

/// The maximum and the smallest index whose value ties with it.
pub(crate) fn tie_argmax<W: Weight>(values: &[W]) -> (W, usize) {
    let best = W::max_of(values);
    if best.is_zero() {
        return (best, 0);
    }
    let arg = values
        .iter()
        .position(|v| v.tie_cmp(&best) == Ordering::Equal)
        .expect("the maximum ties with itself");
    (best, arg)
}

/// Divides `v` by its maximum when requested; returns the divisor.
pub(crate) fn rescale<W: Weight>(v: &mut [W], normalize: bool) -> W {
    if !normalize {
        return W::one();
    }
    let m = W::max_of(v.iter());
    if m.is_zero() {
        return W::one();
    }
    for x in v.iter_mut() {
        *x = x.divide(&m);
    }
    m
}

pub(crate) fn forward<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    pins: &Pins,
    include_initial: bool,
    normalize: bool,
) -> DeltaTable<S::W> {
    let s = model.num_states();
    let n = obs.len();
    let mut delta = Vec::with_capacity(n * s);
    let mut back = vec![0u32; s];
    let mut scale = Vec::with_capacity(n);
    let mut col: Vec<S::W> = (0..s)
        .map(|y| {
            if !pins.allowed(0, y) {
                S::W::zero()
            } else if include_initial {
                model.initial(&obs[0], y)
            } else {
                S::W::one()
            }
        })
        .collect();
    let mut zero_from = col.iter().all(Weight::is_zero).then_some(0);
    scale.push(rescale(&mut col, normalize));
    delta.extend(col.iter().cloned());
    for t in 1..n {
        let w = model.step_weights(&obs[t - 1], &obs[t]);
        let (mut next, bp) = relax(&col, &w, s);
        for (y, v) in next.iter_mut().enumerate() {
            if !pins.allowed(t, y) {
                *v = S::W::zero();
            }
        }
        if zero_from.is_none() && next.iter().all(Weight::is_zero) {
            zero_from = Some(t);
        }
        scale.push(rescale(&mut next, normalize));
        delta.extend(next.iter().cloned());
        back.extend(bp);
        col = next;
    }
    DeltaTable {
        states: s,
        delta,
        back,
        scale,
        zero_from,
    }
}

pub(crate) fn check_input<S: Scorer + ?Sized>(model: &S, obs: &[Observation]) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::InvalidArgument("observation sequence is empty".into()));
    }
    model.check_observations(obs)
}

/// Forward pass of the Viterbi recursion with the initial density, normalized
/// per step when the weight type asks for it.
pub fn delta_forward<S: Scorer + ?Sized>(model: &S, obs: &[Observation]) -> Result<DeltaTable<S::W>> {
    delta_forward_with(model, obs, S::W::NORMALIZE)
}

pub fn delta_forward_with<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    normalize: bool,
) -> Result<DeltaTable<S::W>> {
    check_input(model, obs)?;
    Ok(forward(model, obs, &Pins::new(), true, normalize))
}
