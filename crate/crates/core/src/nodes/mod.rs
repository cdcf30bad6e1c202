//! Nodes, barriers and the searches that certify them.
//!
//! Times and states are 0-based in the API; reports serialize them 1-based.

mod barrier;
mod center;
mod conditions_a;
mod falsify;

use serde::Serialize;

use crate::dp::{delta_forward, segment_max, MaxPlusMatrix};
use crate::error::{Error, Result};
use crate::label;
use crate::scorer::{Observation, Scorer};
use crate::weight::Weight;

pub use barrier::{
    find_prop21_split, verify_barrier_prop21, verify_barrier_prop21_for, BarrierCertificate, CertMethod, Prop21Outcome,
    Refusal, Witness,
};
pub use center::{find_cyclic_center, CenterCandidate, CENTER_GUARD};
pub use conditions_a::{
    check_a_conditions, derive_a_parameters, AConditionsInput, AConditionsReport, AFailure, AParameters, Check,
};
pub use falsify::{falsify_barrier, Counterexample, FalsifyOutcome, FalsifyTarget};

/// Node status of one time `t` for the data `x_{1:m}`, `m = t + order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    #[serde(serialize_with = "label::one")]
    pub time: usize,
    pub order: usize,
    #[serde(serialize_with = "label::many")]
    pub node_states: Vec<usize>,
    #[serde(serialize_with = "label::many")]
    pub strong_states: Vec<usize>,
}

impl NodeReport {
    pub fn is_node(&self) -> bool {
        !self.node_states.is_empty()
    }

    pub fn is_strong(&self) -> bool {
        !self.strong_states.is_empty()
    }

    pub fn is_node_for(&self, state: usize) -> bool {
        self.node_states.contains(&state)
    }

    pub fn is_strong_for(&self, state: usize) -> bool {
        self.strong_states.contains(&state)
    }
}

/// States `i` with `δ(i)·m[i][j] ≥ δ(k)·m[k][j]` for all `j, k`, and the subset for
/// which the inequality is strict whenever `k ≠ i` and the left side is positive.
pub fn node_states<W: Weight>(delta: &[W], seg: &MaxPlusMatrix<W>) -> (Vec<usize>, Vec<usize>) {
    let s = delta.len();
    let value = |k: usize, j: usize| -> W {
        if delta[k].is_zero() {
            W::zero()
        } else {
            delta[k].times(seg.get(k, j))
        }
    };
    let table: Vec<W> = (0..s).flat_map(|k| (0..s).map(move |j| (k, j))).map(|(k, j)| value(k, j)).collect();
    let col_best: Vec<W> = (0..s).map(|j| W::max_of((0..s).map(|k| &table[k * s + j]))).collect();
    let mut nodes = Vec::new();
    let mut strong = Vec::new();
    for i in 0..s {
        if !(0..s).all(|j| table[i * s + j].at_least(&col_best[j])) {
            continue;
        }
        nodes.push(i);
        let strict = (0..s).all(|j| {
            let lhs = &table[i * s + j];
            lhs.is_zero() || (0..s).filter(|&k| k != i).all(|k| lhs.exceeds(&table[k * s + j]))
        });
        if strict {
            strong.push(i);
        }
    }
    (nodes, strong)
}

/// Node status of time `t` (0-based) on the whole of `obs`, i.e. order `obs.len() - 1 - t`.
pub fn detect_node<S: Scorer + ?Sized>(model: &S, obs: &[Observation], t: usize) -> Result<NodeReport> {
    if t >= obs.len() {
        return Err(Error::InvalidArgument(format!(
            "node time {} outside a sequence of length {}",
            t + 1,
            obs.len()
        )));
    }
    let table = delta_forward(model, &obs[..=t])?;
    let seg = segment_max(model, &obs[t..])?;
    let (node_states, strong_states) = node_states(table.normalized(t), &seg);
    Ok(NodeReport {
        time: t,
        order: obs.len() - 1 - t,
        node_states,
        strong_states,
    })
}

/// Every `(t, r)` with `r ≤ max_order` and `t + r < obs.len()`, in order of `t` then `r`.
/// Report `(t, r)` concerns the prefix `x_{1:t+r}` only.
pub fn scan_nodes<S: Scorer + ?Sized>(model: &S, obs: &[Observation], max_order: usize) -> Result<Vec<NodeReport>> {
    let table = delta_forward(model, obs)?;
    let n = obs.len();
    let steps: Vec<MaxPlusMatrix<S::W>> = obs
        .windows(2)
        .map(|w| crate::dp::segment_step_matrix(model, &w[0], &w[1]))
        .collect();
    let mut out = Vec::new();
    for t in 0..n {
        let delta = table.normalized(t);
        let mut seg = MaxPlusMatrix::identity(model.num_states());
        for r in 0..=max_order.min(n - 1 - t) {
            if r > 0 {
                seg = seg.mul(&steps[t + r - 1]);
            }
            let (node_states, strong_states) = node_states(delta, &seg);
            out.push(NodeReport {
                time: t,
                order: r,
                node_states,
                strong_states,
            });
        }
    }
    Ok(out)
}

/// Endpoint pairs with positive segment maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YPlusSet {
    #[serde(serialize_with = "label::pairs")]
    pub pairs: Vec<(usize, usize)>,
    #[serde(serialize_with = "label::many")]
    pub first: Vec<usize>,
    #[serde(serialize_with = "label::many")]
    pub second: Vec<usize>,
}

impl YPlusSet {
    pub fn from_matrix<W: Weight>(seg: &MaxPlusMatrix<W>) -> Self {
        let pairs = seg.support();
        let mut first: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut second: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        first.sort_unstable();
        first.dedup();
        second.sort_unstable();
        second.dedup();
        YPlusSet { pairs, first, second }
    }

    pub fn of_segment<S: Scorer + ?Sized>(model: &S, segment: &[Observation]) -> Result<Self> {
        Ok(Self::from_matrix(&segment_max(model, segment)?))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    /// `pairs = first × second` with `first` non-empty.
    pub fn is_rectangle(&self) -> bool {
        !self.first.is_empty() && self.pairs.len() == self.first.len() * self.second.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::scorer::symbols_1based;

    #[test]
    fn four_state_word_gives_two_nodes_of_order_three() {
        let m = canonical::tiebreak_4state().exact().unwrap();
        let obs = symbols_1based(&[1, 1, 2, 1, 1]);
        let r = detect_node(&m, &obs, 1).unwrap();
        assert_eq!(r.order, 3);
        assert_eq!(r.node_states, vec![0, 1]);
        assert!(r.strong_states.is_empty());
    }

    #[test]
    fn identity_transitions_never_give_nodes() {
        let m = canonical::example_1_2();
        let obs = symbols_1based(&[1, 1, 2, 1, 2, 2, 1, 1]);
        let reports = scan_nodes(&m, &obs, 10).unwrap();
        assert!(reports.iter().all(|r| !r.is_node()));
    }

    #[test]
    fn scan_matches_detect() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let obs = symbols_1based(&[1, 2, 1, 1, 1, 2, 2, 1]);
        for r in scan_nodes(&m, &obs, 4).unwrap() {
            let direct = detect_node(&m, &obs[..=r.time + r.order], r.time).unwrap();
            assert_eq!(r, direct);
        }
    }

    #[test]
    fn y_plus_rectangle() {
        let m = canonical::two_state_pmm();
        let y = YPlusSet::of_segment(&m, &symbols_1based(&[1, 2])).unwrap();
        assert!(y.is_rectangle());
        let y = YPlusSet::of_segment(&canonical::example_1_2(), &symbols_1based(&[1, 2])).unwrap();
        assert_eq!(y.pairs, vec![(0, 0), (1, 1)]);
        assert!(!y.is_rectangle());
    }
}
