use num::{BigRational, One, Zero};
use serde::Serialize;

use crate::dp::{segment_max, MaxPlusMatrix};
use crate::error::{Error, Result};
use crate::label;
use crate::prob::{prob_from_f64, prob_to_f64, Prob};
use crate::scorer::{Observation, Scorer};
use crate::weight::Weight;

use super::barrier::{prop21_witnesses, split_matrices, BarrierCertificate, CertMethod};
use super::YPlusSet;

/// A finite candidate barrier set with its section indices and constants.
#[derive(Clone, Debug, PartialEq)]
pub struct AConditionsInput {
    pub blocks: Vec<Vec<Observation>>,
    /// 1-based `n_1 < … < n_{2N+2}`; every block has length `n_{2N+2}`.
    pub indices: Vec<usize>,
    pub epsilon: Prob,
    pub delta: Prob,
    pub big_delta: Prob,
    pub target: usize,
}

impl AConditionsInput {
    /// `pre ++ (x_{1:n-1})^{2N} ++ x_n ++ post` for a cycle `x_{1:n}`; the flanks
    /// are `pre ++ x_1` and `x_n ++ post`.
    pub fn cyclic(
        cycle: &[Observation],
        cycles: usize,
        pre: &[Observation],
        post: &[Observation],
        params: &AParameters,
        target: usize,
    ) -> Result<Self> {
        let n = cycle.len();
        if n < 2 || cycles < 2 || pre.is_empty() || post.is_empty() {
            return Err(Error::InvalidArgument(
                "cyclic block needs a cycle of length >= 2, N >= 2 and non-empty flanks".into(),
            ));
        }
        let mut block = pre.to_vec();
        for _ in 0..2 * cycles {
            block.extend_from_slice(&cycle[..n - 1]);
        }
        block.push(cycle[n - 1].clone());
        block.extend_from_slice(post);
        let mut indices = vec![pre.len() + 1];
        for k in 0..2 * cycles {
            indices.push(indices[k] + n - 1);
        }
        indices.push(block.len());
        Ok(AConditionsInput {
            blocks: vec![block],
            indices,
            epsilon: params.epsilon.clone(),
            delta: params.delta.clone(),
            big_delta: params.big_delta.clone(),
            target,
        })
    }

    pub fn cycles(&self) -> usize {
        (self.indices.len() - 2) / 2
    }

    fn validate(&self, states: usize) -> Result<()> {
        let len = self.indices.len();
        if len < 6 || !len.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "need 2N + 2 indices with N >= 2, got {len}"
            )));
        }
        if self.indices[0] == 0 || self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("indices must be 1-based and strictly increasing".into()));
        }
        let m = self.indices[len - 1];
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.len() != m) {
            return Err(Error::InvalidArgument(format!("every block must have length n_(2N+2) = {m}")));
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        if self.epsilon <= zero || self.epsilon >= one {
            return Err(Error::InvalidArgument("epsilon must lie in (0, 1)".into()));
        }
        if self.delta <= zero || self.delta > self.big_delta {
            return Err(Error::InvalidArgument("need 0 < delta <= Delta".into()));
        }
        if self.target >= states {
            return Err(Error::InvalidArgument("target state out of range".into()));
        }
        Ok(())
    }
}

/// Where an inequality failed (1-based block, section and states).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AFailure {
    pub block: usize,
    pub section: usize,
    #[serde(serialize_with = "label::opt")]
    pub i: Option<usize>,
    #[serde(serialize_with = "label::opt")]
    pub j: Option<usize>,
    pub rule: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    /// Smallest log gap over the inequalities of this item.
    #[serde(serialize_with = "label::ln")]
    pub margin: f64,
    pub failure: Option<AFailure>,
}

impl Check {
    fn new() -> Self {
        Check {
            pass: true,
            margin: f64::INFINITY,
            failure: None,
        }
    }

    fn record(&mut self, gap: f64, ok: bool, at: impl FnOnce() -> AFailure) {
        self.margin = self.margin.min(gap);
        if !ok && self.pass {
            self.pass = false;
            self.failure = Some(at());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AConditionsReport {
    pub cycles: usize,
    pub a1: Check,
    /// Column family `p_cc ≥ p_ic` strict for every `i ≠ c` in every section.
    pub a1_prime_column: bool,
    /// Row family `p_cc ≥ p_ci` strict for every `i ≠ c` in every section.
    pub a1_prime_row: bool,
    pub a2: Check,
    pub a3: Check,
    /// `Δ/δ · (1-ε)^N`.
    pub a3_value: f64,
    pub order: usize,
    pub certificates: Vec<BarrierCertificate>,
}

impl AConditionsReport {
    pub fn a1_prime(&self) -> bool {
        self.a1.pass && (self.a1_prime_column || self.a1_prime_row)
    }

    pub fn pass(&self) -> bool {
        self.a1.pass && self.a2.pass && self.a3.pass
    }
}

fn gap<W: Weight>(lhs: &W, rhs: &W) -> f64 {
    if lhs.is_zero() && rhs.is_zero() {
        0.0
    } else {
        lhs.ln() - rhs.ln()
    }
}

/// Evaluates A1, A1', A2 and A3 on every block; certificates of order
/// `n_{2N+2} - n_{N+1}` are emitted only when all three pass.
pub fn check_a_conditions<S: Scorer + ?Sized>(model: &S, input: &AConditionsInput) -> Result<AConditionsReport> {
    let s = model.num_states();
    input.validate(s)?;
    let c = input.target;
    let idx = &input.indices;
    let cycles = input.cycles();
    let one_minus_eps = S::W::from_ratio(&(BigRational::one() - &input.epsilon));
    let delta = S::W::from_ratio(&input.delta);
    let big_delta = S::W::from_ratio(&input.big_delta);

    let mut a1 = Check::new();
    let (mut col_strict, mut row_strict) = (true, true);
    let mut a2 = Check::new();
    for (b, block) in input.blocks.iter().enumerate() {
        for k in 0..2 * cycles {
            let sec = segment_max(model, &block[idx[k] - 1..idx[k + 1]])?;
            let p = sec.get(c, c);
            let at = |i: Option<usize>, j: Option<usize>, rule| AFailure {
                block: b + 1,
                section: k + 1,
                i,
                j,
                rule,
            };
            for i in 0..s {
                let col = sec.get(i, c);
                a1.record(gap(p, col), p.at_least(col), || at(Some(i), Some(c), "p_11 >= p_i1"));
                let row = sec.get(c, i);
                a1.record(gap(p, row), p.at_least(row), || at(Some(c), Some(i), "p_11 >= p_1i"));
                if i != c {
                    col_strict &= p.exceeds(col);
                    row_strict &= p.exceeds(row);
                }
            }
            let scaled = p.times(&one_minus_eps);
            for i in (0..s).filter(|&i| i != c) {
                for j in (0..s).filter(|&j| j != c) {
                    let q = sec.get(i, j);
                    a1.record(gap(&scaled, q), scaled.exceeds(q), || {
                        at(Some(i), Some(j), "p_11 (1 - eps) > p_ij")
                    });
                }
            }
        }
        let head = segment_max(model, &block[..idx[0]])?;
        let tail = segment_max(model, &block[idx[2 * cycles] - 1..])?;
        check_flank(&mut a2, &head, &big_delta, &delta, c, b + 1, 0, true);
        check_flank(&mut a2, &tail, &big_delta, &delta, c, b + 1, 2 * cycles + 1, false);
    }

    let ratio = &input.big_delta / &input.delta;
    let shrink = num::pow(BigRational::one() - &input.epsilon, cycles);
    let value = ratio * shrink;
    let a3_value = prob_to_f64(&value);
    let a3 = Check {
        pass: value < BigRational::one(),
        margin: -a3_value.ln(),
        failure: (value >= BigRational::one()).then_some(AFailure {
            block: 0,
            section: 0,
            i: None,
            j: None,
            rule: "Delta / delta (1 - eps)^N < 1",
        }),
    };

    let order = idx[idx.len() - 1] - idx[cycles];
    let mut report = AConditionsReport {
        cycles,
        a1,
        a1_prime_column: col_strict,
        a1_prime_row: row_strict,
        a2,
        a3,
        a3_value,
        order,
        certificates: Vec::new(),
    };
    if report.pass() {
        let strict = report.a1_prime();
        let split = idx[cycles];
        for block in &input.blocks {
            let (a, b) = split_matrices(model, block, split)?;
            let (witnesses, _, _) = prop21_witnesses(&a, &b, c);
            report.certificates.push(BarrierCertificate {
                block: block.clone(),
                split,
                order,
                target: c,
                strict,
                method: CertMethod::AConditions,
                witnesses,
            });
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn check_flank<W: Weight>(
    check: &mut Check,
    m: &MaxPlusMatrix<W>,
    big_delta: &W,
    delta: &W,
    c: usize,
    block: usize,
    section: usize,
    head: bool,
) {
    let s = m.dim();
    let at = |i: Option<usize>, j: Option<usize>, rule| AFailure {
        block,
        section,
        i,
        j,
        rule,
    };
    for i in 0..s {
        for j in 0..s {
            let v = m.get(i, j);
            check.record(gap(big_delta, v), !v.exceeds(big_delta), || at(Some(i), Some(j), "p_ij <= Delta"));
        }
    }
    let yp = YPlusSet::from_matrix(m);
    if yp.is_empty() {
        check.record(f64::NEG_INFINITY, false, || at(None, None, "Y+ non-empty"));
        return;
    }
    if head {
        for &i in &yp.first {
            let v = m.get(i, c);
            check.record(gap(v, delta), v.at_least(delta), || at(Some(i), Some(c), "p_i1 >= delta"));
        }
    } else {
        for &j in &yp.second {
            let v = m.get(c, j);
            check.record(gap(v, delta), v.at_least(delta), || at(Some(c), Some(j), "p_1j >= delta"));
        }
    }
}

/// Constants read off a single block: the tightest `δ`, `Δ`, the supremum of
/// admissible `ε`, and an `ε` strictly below it that makes A3 hold when one exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AParameters {
    #[serde(serialize_with = "ser_prob")]
    pub epsilon: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub delta: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub big_delta: Prob,
    /// `1 - max_{i,j ≠ c} p_ij / p_cc` over the center sections.
    pub epsilon_sup: f64,
    /// Smallest `ε` for which A3 holds with these `δ, Δ` and `N`.
    pub epsilon_needed: f64,
}

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(prob_to_f64(p))
}

/// Reads `δ`, `Δ` and `ε` off `block` split at `indices`; `None` if a flank has empty `Y⁺`
/// or `δ = 0`, or the center admits no positive `ε`.
pub fn derive_a_parameters<S: Scorer + ?Sized>(
    model: &S,
    block: &[Observation],
    indices: &[usize],
    target: usize,
) -> Result<Option<AParameters>> {
    let len = indices.len();
    if len < 6 || !len.is_multiple_of(2) || indices[len - 1] != block.len() || indices[0] == 0 {
        return Err(Error::InvalidArgument("indices do not describe this block".into()));
    }
    let cycles = (len - 2) / 2;
    let s = model.num_states();
    let c = target;
    let head = segment_max(model, &block[..indices[0]])?;
    let tail = segment_max(model, &block[indices[2 * cycles] - 1..])?;
    let (hy, ty) = (YPlusSet::from_matrix(&head), YPlusSet::from_matrix(&tail));
    if hy.is_empty() || ty.is_empty() {
        return Ok(None);
    }
    let ln_delta = hy
        .first
        .iter()
        .map(|&i| head.get(i, c).ln())
        .chain(ty.second.iter().map(|&j| tail.get(c, j).ln()))
        .fold(f64::INFINITY, f64::min);
    let ln_big = head
        .as_slice()
        .iter()
        .chain(tail.as_slice())
        .map(|w| w.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    if ln_delta == f64::NEG_INFINITY {
        return Ok(None);
    }
    let mut worst = f64::NEG_INFINITY;
    for k in 0..2 * cycles {
        let sec = segment_max(model, &block[indices[k] - 1..indices[k + 1]])?;
        let p = sec.get(c, c).ln();
        for i in (0..s).filter(|&i| i != c) {
            for j in (0..s).filter(|&j| j != c) {
                worst = worst.max(sec.get(i, j).ln() - p);
            }
        }
    }
    let epsilon_sup = if s == 1 { 1.0 } else { 1.0 - worst.exp() };
    if epsilon_sup.is_nan() || epsilon_sup <= 0.0 {
        return Ok(None);
    }
    let epsilon_needed = 1.0 - ((ln_delta - ln_big) / cycles as f64).exp();
    let eps = if epsilon_needed < epsilon_sup {
        0.5 * (epsilon_needed.max(0.0) + epsilon_sup)
    } else {
        0.5 * epsilon_sup
    };
    let eps = eps.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    Ok(Some(AParameters {
        epsilon: prob_from_f64(eps)?,
        // rounded outwards so the exact comparisons keep holding
        delta: prob_from_f64(ln_delta.exp() * (1.0 - 1e-12))?,
        big_delta: prob_from_f64(ln_big.exp().max(ln_delta.exp()) * (1.0 + 1e-12))?,
        epsilon_sup,
        epsilon_needed,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::prob::parse_prob;
    use crate::scorer::symbols_1based;

    fn params(e: &str, d: &str, big: &str) -> AParameters {
        AParameters {
            epsilon: parse_prob(e).unwrap(),
            delta: parse_prob(d).unwrap(),
            big_delta: parse_prob(big).unwrap(),
            epsilon_sup: 0.0,
            epsilon_needed: 0.0,
        }
    }

    #[test]
    fn short_center_fails_a3_long_center_passes() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let one = symbols_1based(&[1]);
        let cycle = symbols_1based(&[1, 1]);
        let p = params("0.12", "0.1", "0.4");
        let short = check_a_conditions(&m, &AConditionsInput::cyclic(&cycle, 2, &one, &one, &p, 0).unwrap()).unwrap();
        assert!(short.a1.pass && short.a2.pass && !short.a3.pass);
        assert!((short.a3_value - 4.0 * 0.88f64.powi(2)).abs() < 1e-12);
        assert!(short.certificates.is_empty());
        let long = check_a_conditions(&m, &AConditionsInput::cyclic(&cycle, 11, &one, &one, &p, 0).unwrap()).unwrap();
        assert!(long.pass() && long.a1_prime());
        assert_eq!(long.order, 12);
        assert!(long.certificates[0].reverify(&m).unwrap());
    }

    #[test]
    fn epsilon_too_large_breaks_a1() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let one = symbols_1based(&[1]);
        let r = check_a_conditions(
            &m,
            &AConditionsInput::cyclic(&symbols_1based(&[1, 1]), 11, &one, &one, &params("0.125", "0.1", "0.4"), 0).unwrap(),
        )
        .unwrap();
        assert!(!r.a1.pass);
        assert_eq!(r.a1.failure.as_ref().unwrap().rule, "p_11 (1 - eps) > p_ij");
        assert_eq!(r.a1.failure.as_ref().unwrap().section, 1);
    }

    #[test]
    fn derived_parameters_match_the_matrix() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let one = symbols_1based(&[1]);
        let input = AConditionsInput::cyclic(&symbols_1based(&[1, 1]), 11, &one, &one, &params("0.1", "0.1", "1"), 0).unwrap();
        let p = derive_a_parameters(&m, &input.blocks[0], &input.indices, 0).unwrap().unwrap();
        assert!((p.epsilon_sup - 0.125).abs() < 1e-12);
        assert!((prob_to_f64(&p.delta) - 0.1).abs() < 1e-12);
        assert!((prob_to_f64(&p.big_delta) - 0.4).abs() < 1e-12);
        let again = AConditionsInput {
            epsilon: p.epsilon,
            delta: p.delta,
            big_delta: p.big_delta,
            ..input
        };
        assert!(check_a_conditions(&m, &again).unwrap().pass());
    }
}
