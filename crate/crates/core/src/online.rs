//! Streaming decoder that commits path prefixes at detected nodes.
//!
//! Each push advances the forward scores one step and tests the time `t = m - r`
//! for an order-`r` node. When a node state is found, the piece between the
//! previous commit and `t` is solved with both ends pinned and emitted; it never
//! changes afterwards.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dp::{constrained_path, relax, rescale, MaxPlusMatrix, TieRule};
use crate::error::{Error, Result};
use crate::nodes::node_states;
use crate::scorer::{Observation, Scorer};
use crate::weight::{NeumaierSum, Weight};

/// What to do when the buffer since the last commit reaches `max_buffer`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverflowPolicy {
    /// Refuse the observation with [`Error::BufferFull`].
    #[default]
    Reject,
    /// Commit at `t = m - r` through the currently best state without a node
    /// certificate. Pieces emitted this way are flagged `forced`.
    ForceCommit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecoderConfig {
    pub order: usize,
    /// Minimum gap between consecutive commit times; `None` means `order`.
    pub separation: Option<usize>,
    pub tie: TieRule,
    pub require_strong: bool,
    pub max_buffer: Option<usize>,
    pub overflow: OverflowPolicy,
}

impl DecoderConfig {
    pub fn new(order: usize) -> Self {
        DecoderConfig {
            order,
            separation: None,
            tie: TieRule::Lexicographic,
            require_strong: false,
            max_buffer: None,
            overflow: OverflowPolicy::Reject,
        }
    }

    pub fn separation(&self) -> usize {
        self.separation.unwrap_or(self.order)
    }
}

/// A committed stretch of the path; times are 0-based stream positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub start: usize,
    pub states: Vec<usize>,
    pub node_time: usize,
    pub node_state: usize,
    pub forced: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DecoderDiagnostics {
    pub observations: usize,
    /// Times `t = m - r` at which the node test succeeded.
    pub nodes_seen: usize,
    pub commits: usize,
    pub forced_commits: usize,
    pub committed_len: usize,
    pub buffer_high_water: usize,
    /// Log of the accumulated normalization constants.
    pub log_offset: f64,
    /// Smallest finite normalized log score seen.
    pub min_log_delta: f64,
    /// 1-based time at which every path became impossible.
    pub zero_likelihood_at: Option<usize>,
}

/// The uncommitted end of the stream as of a flush.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tail {
    pub start: usize,
    pub states: Vec<usize>,
    pub provisional: bool,
    pub diagnostics: DecoderDiagnostics,
}

/// Max-plus product of a sliding window of step matrices, two-stack style.
#[derive(Clone, Debug)]
struct Window<W> {
    dim: usize,
    // suffix products, last entry = product of the whole front part
    front: Vec<MaxPlusMatrix<W>>,
    back: Vec<MaxPlusMatrix<W>>,
    back_prod: MaxPlusMatrix<W>,
}

impl<W: Weight> Window<W> {
    fn new(dim: usize) -> Self {
        Window {
            dim,
            front: Vec::new(),
            back: Vec::new(),
            back_prod: MaxPlusMatrix::identity(dim),
        }
    }

    fn len(&self) -> usize {
        self.front.len() + self.back.len()
    }

    fn push(&mut self, m: MaxPlusMatrix<W>) {
        self.back_prod = self.back_prod.mul(&m);
        self.back.push(m);
    }

    fn pop_front(&mut self) {
        if self.front.is_empty() {
            let mut acc = MaxPlusMatrix::identity(self.dim);
            for m in self.back.drain(..).rev() {
                acc = m.mul(&acc);
                self.front.push(acc.clone());
            }
            self.back_prod = MaxPlusMatrix::identity(self.dim);
        }
        self.front.pop();
    }

    fn product(&self) -> MaxPlusMatrix<W> {
        match self.front.last() {
            Some(f) => f.mul(&self.back_prod),
            None => self.back_prod.clone(),
        }
    }
}

/// Single-owner streaming state over a borrowed model.
pub struct DecoderState<'m, S: Scorer + ?Sized> {
    model: &'m S,
    config: DecoderConfig,
    /// Observations from `base` to the newest one.
    buffer: Vec<Observation>,
    base: usize,
    last: Option<(usize, usize)>,
    /// Normalized forward scores of the last `order + 1` times, newest last.
    history: VecDeque<Vec<S::W>>,
    window: Window<S::W>,
    offset: NeumaierSum,
    committed: Vec<usize>,
    diag: DecoderDiagnostics,
    dead: bool,
}

/// Opens a stream; nothing is committed yet.
pub fn open_stream<S: Scorer + ?Sized>(model: &S, config: DecoderConfig) -> DecoderState<'_, S> {
    DecoderState {
        model,
        window: Window::new(model.num_states()),
        config,
        buffer: Vec::new(),
        base: 0,
        last: None,
        history: VecDeque::new(),
        offset: NeumaierSum::default(),
        committed: Vec::new(),
        diag: DecoderDiagnostics {
            min_log_delta: 0.0,
            ..DecoderDiagnostics::default()
        },
        dead: false,
    }
}

impl<'m, S: Scorer + ?Sized> DecoderState<'m, S> {
    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    /// Every state emitted so far, from time 0.
    pub fn committed(&self) -> &[usize] {
        &self.committed
    }

    pub fn last_commit(&self) -> Option<(usize, usize)> {
        self.last
    }

    pub fn diagnostics(&self) -> &DecoderDiagnostics {
        &self.diag
    }

    /// Number of observations consumed.
    pub fn len(&self) -> usize {
        self.diag.observations
    }

    pub fn is_empty(&self) -> bool {
        self.diag.observations == 0
    }

    /// Consumes one observation; returns the piece committed by it, if any.
    pub fn push(&mut self, obs: Observation) -> Result<Option<Piece>> {
        if self.dead {
            return Err(Error::ZeroLikelihood {
                t: self.diag.zero_likelihood_at.unwrap_or(0),
            });
        }
        self.model.check_observations(std::slice::from_ref(&obs))?;
        let overflow = self.config.max_buffer.is_some_and(|cap| self.buffer.len() >= cap);
        if overflow && self.config.overflow == OverflowPolicy::Reject {
            return Err(Error::BufferFull {
                capacity: self.buffer.len(),
            });
        }
        let s = self.model.num_states();
        let mut next = match (self.history.back(), self.buffer.last()) {
            (Some(prev), Some(prev_obs)) => {
                let w = self.model.step_weights(prev_obs, &obs);
                if self.config.order > 0 {
                    self.window.push(MaxPlusMatrix::from_row_major(s, w.clone()));
                }
                relax(prev, &w, s).0
            }
            _ => (0..s).map(|y| self.model.initial(&obs, y)).collect(),
        };
        let m = self.diag.observations;
        if next.iter().all(Weight::is_zero) {
            self.dead = true;
            self.diag.zero_likelihood_at = Some(m + 1);
            return Err(Error::ZeroLikelihood { t: m + 1 });
        }
        let scale = rescale(&mut next, S::W::NORMALIZE);
        self.offset.add(scale.ln());
        self.diag.log_offset = self.offset.total();
        for v in &next {
            let l = v.ln();
            if l.is_finite() && l < self.diag.min_log_delta {
                self.diag.min_log_delta = l;
            }
        }
        self.buffer.push(obs);
        self.diag.observations += 1;
        self.diag.buffer_high_water = self.diag.buffer_high_water.max(self.buffer.len());
        self.history.push_back(next);
        if self.history.len() > self.config.order + 1 {
            self.history.pop_front();
        }
        while self.window.len() > self.config.order {
            self.window.pop_front();
        }
        let r = self.config.order;
        if m < r {
            return Ok(None);
        }
        let t = m - r;
        let seg = self.window.product();
        let (nodes, strong) = node_states(&self.history[0], &seg);
        let found = if self.config.require_strong { &strong } else { &nodes };
        if !found.is_empty() {
            self.diag.nodes_seen += 1;
        }
        let allowed = match self.last {
            None => true,
            Some((u, _)) => t > u && t - u >= self.config.separation(),
        };
        if let (Some(&state), true) = (found.first(), allowed) {
            return self.commit(t, state, false).map(Some);
        }
        let still_full = self.config.max_buffer.is_some_and(|cap| self.buffer.len() > cap);
        if still_full && self.last.is_none_or(|(u, _)| t > u) {
            let delta = &self.history[0];
            let score = |i: usize| S::W::max_of((0..s).map(|j| delta[i].times(seg.get(i, j))).collect::<Vec<_>>().iter());
            let scores: Vec<S::W> = (0..s).map(score).collect();
            let (_, state) = crate::dp::tie_argmax(&scores);
            return self.commit(t, state, true).map(Some);
        }
        Ok(None)
    }

    fn commit(&mut self, t: usize, state: usize, forced: bool) -> Result<Piece> {
        let from = t - self.base;
        let segment = &self.buffer[..=from];
        let start_pin = self.last.map(|(_, y)| y);
        let dec = constrained_path(
            self.model,
            segment,
            start_pin,
            Some(state),
            self.last.is_none(),
            &self.config.tie,
        )?;
        if dec.is_zero() {
            self.dead = true;
            self.diag.zero_likelihood_at = Some(t + 1);
            return Err(Error::ZeroLikelihood { t: t + 1 });
        }
        let (start, states) = if self.last.is_some() {
            (self.base + 1, dec.path[1..].to_vec())
        } else {
            (self.base, dec.path)
        };
        self.committed.extend_from_slice(&states);
        self.buffer.drain(..from);
        self.base = t;
        self.last = Some((t, state));
        self.diag.commits += 1;
        self.diag.forced_commits += forced as usize;
        self.diag.committed_len = self.committed.len();
        Ok(Piece {
            start,
            states,
            node_time: t,
            node_state: state,
            forced,
        })
    }

    /// Best continuation from the last commit to the newest observation, with no
    /// end pin. It may change as more data arrive.
    pub fn flush(&self) -> Result<Tail> {
        let empty = |start| Tail {
            start,
            states: Vec::new(),
            provisional: true,
            diagnostics: self.diag.clone(),
        };
        if self.buffer.is_empty() || self.dead {
            return Ok(empty(self.committed.len()));
        }
        let dec = constrained_path(
            self.model,
            &self.buffer,
            self.last.map(|(_, y)| y),
            None,
            self.last.is_none(),
            &self.config.tie,
        )?;
        if dec.is_zero() {
            return Ok(empty(self.committed.len()));
        }
        let (start, states) = if self.last.is_some() {
            (self.base + 1, dec.path[1..].to_vec())
        } else {
            (self.base, dec.path)
        };
        Ok(Tail {
            start,
            states,
            provisional: true,
            diagnostics: self.diag.clone(),
        })
    }
}

/// Runs a whole sequence through a fresh stream and returns the committed
/// prefix, the flushed tail and the per-commit pieces.
pub fn decode_stream<S: Scorer + ?Sized>(
    model: &S,
    config: DecoderConfig,
    obs: &[Observation],
) -> Result<(Vec<usize>, Tail, Vec<Piece>)> {
    let mut st = open_stream(model, config);
    let mut pieces = Vec::new();
    for o in obs {
        if let Some(p) = st.push(o.clone())? {
            pieces.push(p);
        }
    }
    let tail = st.flush()?;
    Ok((st.committed().to_vec(), tail, pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::dp::{path_score, viterbi_path};
    use crate::scorer::symbols_1based;
    use crate::simulate::{simulate, Seed};

    #[test]
    fn nothing_committed_at_open() {
        let m = canonical::two_state_pmm();
        let st = open_stream(&m, DecoderConfig::new(1));
        assert!(st.committed().is_empty());
        assert!(st.flush().unwrap().states.is_empty());
    }

    #[test]
    fn flush_without_commits_is_offline_viterbi() {
        let m = canonical::example_1_2();
        let obs = symbols_1based(&[1, 2, 2, 1, 2]);
        let (committed, tail, _) = decode_stream(&m, DecoderConfig::new(2), &obs).unwrap();
        assert!(committed.is_empty());
        assert_eq!(tail.states, viterbi_path(&m, &obs, &TieRule::Lexicographic).unwrap().path);
    }

    #[test]
    fn four_state_block_commits_at_its_second_position() {
        let m = canonical::tiebreak_4state().exact().unwrap();
        let obs = symbols_1based(&[1, 1, 2, 1, 1]);
        // time 0 is already an order-3 node of x_{1:4}; separation 1 lets time 1 commit too
        let mut cfg = DecoderConfig::new(3);
        cfg.separation = Some(1);
        let (committed, _, pieces) = decode_stream(&m, cfg, &obs).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!((pieces[1].node_time, pieces[1].node_state), (1, 0));
        assert_eq!(committed, vec![0, 0]);
    }

    #[test]
    fn glued_path_is_optimal_and_prefix_stable() {
        let m = canonical::two_state_pmm();
        let traj = simulate(&m, 2_000, Seed(3)).unwrap();
        let mut st = open_stream(&m, DecoderConfig::new(1));
        let mut seen: Vec<usize> = Vec::new();
        for o in &traj.observations {
            st.push(o.clone()).unwrap();
            assert!(st.committed().starts_with(&seen));
            seen = st.committed().to_vec();
        }
        assert!(seen.len() > 100);
        let tail = st.flush().unwrap();
        let mut full = seen.clone();
        full.extend(&tail.states);
        let offline = viterbi_path(&m, &traj.observations, &TieRule::Lexicographic).unwrap();
        let glued = path_score(&m, &traj.observations, &full, true);
        assert!((glued.ln() - offline.log_likelihood()).abs() < 1e-9);
    }

    #[test]
    fn reject_and_force_on_overflow() {
        let m = canonical::example_1_2();
        let mut cfg = DecoderConfig::new(1);
        cfg.max_buffer = Some(3);
        let mut st = open_stream(&m, cfg.clone());
        for o in symbols_1based(&[1, 2, 1]) {
            st.push(o).unwrap();
        }
        assert!(matches!(st.push(Observation::Symbol(0)), Err(Error::BufferFull { .. })));
        cfg.overflow = OverflowPolicy::ForceCommit;
        let mut st = open_stream(&m, cfg);
        let mut forced = 0;
        for o in symbols_1based(&[1, 2, 1, 1, 2, 2, 1]) {
            if let Some(p) = st.push(o).unwrap() {
                assert!(p.forced);
                forced += 1;
            }
        }
        assert!(forced > 0);
        assert!(st.diagnostics().buffer_high_water <= 4);
    }

    #[test]
    fn zero_likelihood_ends_the_stream() {
        let m = crate::model::load_model(
            r#"{"type":"hmm","transitions":[["1","0"],["0","1"]],
                "emissions":[["1","0"],["0","1"]],"initial_hidden":["1","0"]}"#,
        )
        .unwrap();
        let mut st = open_stream(&m, DecoderConfig::new(1));
        st.push(Observation::Symbol(0)).unwrap();
        assert!(matches!(st.push(Observation::Symbol(1)), Err(Error::ZeroLikelihood { t: 2 })));
        assert!(st.push(Observation::Symbol(0)).is_err());
        assert_eq!(st.diagnostics().zero_likelihood_at, Some(2));
    }
}
