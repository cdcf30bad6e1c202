use serde::Serialize;

use crate::dp::{segment_max, MaxPlusMatrix};
use crate::error::{Error, Result};
use crate::label;
use crate::scorer::{Observation, Scorer};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    Prop21,
    AConditions,
}

/// One checked triple `p_{i,c}(b_{1:l})·p_{c,j}(b_{l:M})` against `p_{ik}(b_{1:l})·p_{kj}(b_{l:M})`,
/// `c` the target state; `margin = lhs_ln - rhs_ln`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "label::one")]
    pub i: usize,
    #[serde(serialize_with = "label::one")]
    pub j: usize,
    #[serde(serialize_with = "label::one")]
    pub k: usize,
    #[serde(serialize_with = "label::ln")]
    pub lhs_ln: f64,
    #[serde(serialize_with = "label::ln")]
    pub rhs_ln: f64,
    #[serde(serialize_with = "label::ln")]
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierCertificate {
    pub block: Vec<Observation>,
    /// 1-based split index `l` inside the block; the node sits at `b_l`.
    pub split: usize,
    /// `M - l`.
    pub order: usize,
    #[serde(serialize_with = "label::one")]
    pub target: usize,
    pub strict: bool,
    pub method: CertMethod,
    pub witnesses: Vec<Witness>,
}

impl BarrierCertificate {
    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    /// 0-based position of the node when the block starts at 0-based `start`.
    pub fn node_time(&self, start: usize) -> usize {
        start + self.split - 1
    }

    /// Recomputes every recorded triple from the block and checks it still holds
    /// (strictly, for `k ≠ target` with positive left side, when the certificate is strict).
    pub fn reverify<S: Scorer + ?Sized>(&self, model: &S) -> Result<bool> {
        let (a, b) = split_matrices(model, &self.block, self.split)?;
        let s = model.num_states();
        if self.witnesses.len() != s * s * s {
            return Ok(false);
        }
        Ok(self.witnesses.iter().all(|w| {
            let (lhs, rhs) = triple(&a, &b, self.target, w.i, w.j, w.k);
            let ok = lhs.at_least(&rhs);
            let strict_ok = !self.strict || w.k == self.target || lhs.is_zero() || lhs.exceeds(&rhs);
            ok && strict_ok
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refusal {
    pub block: Vec<Observation>,
    pub split: usize,
    #[serde(serialize_with = "label::one")]
    pub target: usize,
    /// The triple with the most negative margin.
    pub violation: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Prop21Outcome {
    Certified(BarrierCertificate),
    Refused(Refusal),
}

impl Prop21Outcome {
    pub fn certificate(&self) -> Option<&BarrierCertificate> {
        match self {
            Prop21Outcome::Certified(c) => Some(c),
            Prop21Outcome::Refused(_) => None,
        }
    }

    pub fn into_certificate(self) -> Option<BarrierCertificate> {
        match self {
            Prop21Outcome::Certified(c) => Some(c),
            Prop21Outcome::Refused(_) => None,
        }
    }
}

pub(crate) fn split_matrices<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    split: usize,
) -> Result<(MaxPlusMatrix<S::W>, MaxPlusMatrix<S::W>)> {
    let m = block.len();
    if m < 3 || split < 2 || split > m - 1 {
        return Err(Error::InvalidArgument(format!(
            "split l = {split} needs 2 <= l <= M - 1 with M = {m} >= 3"
        )));
    }
    Ok((segment_max(model, &block[..split])?, segment_max(model, &block[split - 1..])?))
}

fn triple<W: Weight>(a: &MaxPlusMatrix<W>, b: &MaxPlusMatrix<W>, c: usize, i: usize, j: usize, k: usize) -> (W, W) {
    (a.get(i, c).times(b.get(c, j)), a.get(i, k).times(b.get(k, j)))
}

pub(crate) fn prop21_witnesses<W: Weight>(a: &MaxPlusMatrix<W>, b: &MaxPlusMatrix<W>, target: usize) -> (Vec<Witness>, bool, bool) {
    let s = a.dim();
    let mut witnesses = Vec::with_capacity(s * s * s);
    let mut holds = true;
    let mut strict = true;
    for i in 0..s {
        for j in 0..s {
            for k in 0..s {
                let (lhs, rhs) = triple(a, b, target, i, j, k);
                holds &= lhs.at_least(&rhs);
                if k != target && !lhs.is_zero() {
                    strict &= lhs.exceeds(&rhs);
                }
                let (lhs_ln, rhs_ln) = (lhs.ln(), rhs.ln());
                let margin = if lhs.is_zero() && rhs.is_zero() { 0.0 } else { lhs_ln - rhs_ln };
                witnesses.push(Witness {
                    i,
                    j,
                    k,
                    lhs_ln,
                    rhs_ln,
                    margin,
                });
            }
        }
    }
    (witnesses, holds, holds && strict)
}

/// Sufficient condition for `block` to be a `target`-barrier of order `M - l`.
pub fn verify_barrier_prop21_for<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    split: usize,
    target: usize,
) -> Result<Prop21Outcome> {
    if target >= model.num_states() {
        return Err(Error::InvalidArgument(format!("target state {} out of range", target + 1)));
    }
    let (a, b) = split_matrices(model, block, split)?;
    let (witnesses, holds, strict) = prop21_witnesses(&a, &b, target);
    if !holds {
        let violation = witnesses
            .iter()
            .min_by(|x, y| x.margin.total_cmp(&y.margin))
            .cloned()
            .expect("at least one triple");
        return Ok(Prop21Outcome::Refused(Refusal {
            block: block.to_vec(),
            split,
            target,
            violation,
        }));
    }
    Ok(Prop21Outcome::Certified(BarrierCertificate {
        block: block.to_vec(),
        split,
        order: block.len() - split,
        target,
        strict,
        method: CertMethod::Prop21,
        witnesses,
    }))
}

/// [`verify_barrier_prop21_for`] with the distinguished state (index 0) as target.
pub fn verify_barrier_prop21<S: Scorer + ?Sized>(model: &S, block: &[Observation], split: usize) -> Result<Prop21Outcome> {
    verify_barrier_prop21_for(model, block, split, 0)
}

/// First split `l = 2, …, M-1` that certifies; strict certificates are preferred.
pub fn find_prop21_split<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    target: usize,
) -> Result<Option<BarrierCertificate>> {
    if block.len() < 3 {
        return Ok(None);
    }
    let mut weak = None;
    for l in 2..block.len() {
        if let Some(c) = verify_barrier_prop21_for(model, block, l, target)?.into_certificate() {
            if c.strict {
                return Ok(Some(c));
            }
            weak.get_or_insert(c);
        }
    }
    Ok(weak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::scorer::symbols_1based;

    #[test]
    fn two_state_short_block_is_refused_at_the_cross_term() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let out = verify_barrier_prop21(&m, &symbols_1based(&[1, 1, 1]), 2).unwrap();
        let Prop21Outcome::Refused(r) = out else { panic!("expected refusal") };
        // 0.15·0.1 against 0.35·0.35
        assert_eq!((r.violation.i, r.violation.j, r.violation.k), (1, 1, 1));
        assert!((r.violation.margin - (0.015f64 / 0.1225).ln()).abs() < 1e-12);
    }

    #[test]
    fn identity_transitions_refuse_everything() {
        let m = canonical::example_1_2();
        for block in [[1, 1, 1], [1, 2, 1], [2, 2, 2]] {
            let out = verify_barrier_prop21(&m, &symbols_1based(&block), 2).unwrap();
            assert!(out.certificate().is_none());
        }
    }

    #[test]
    fn certificate_reverifies() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let block = symbols_1based(&[1; 20]);
        let c = find_prop21_split(&m, &block, 0).unwrap().expect("long 1-run certifies");
        assert!(c.strict);
        assert!(c.reverify(&m).unwrap());
        let mut forged = c.clone();
        forged.block = symbols_1based(&[2; 20]);
        assert!(!forged.reverify(&m).unwrap());
    }

    #[test]
    fn shortest_certified_one_run_has_length_nineteen() {
        let m = canonical::two_state_pmm().exact().unwrap();
        // 0.015·0.4^(M-3) ≥ 0.35^(M-1) first holds at M = 19
        assert!(find_prop21_split(&m, &symbols_1based(&[1; 18]), 0).unwrap().is_none());
        assert!(find_prop21_split(&m, &symbols_1based(&[1; 19]), 0).unwrap().is_some());
    }

    #[test]
    fn bad_split_is_an_error() {
        let m = canonical::two_state_pmm();
        assert!(verify_barrier_prop21(&m, &symbols_1based(&[1, 1, 1]), 3).is_err());
        assert!(verify_barrier_prop21(&m, &symbols_1based(&[1, 1]), 2).is_err());
    }
}
