use serde::Serialize;

use crate::dp::segment_max;
use crate::error::{Error, Result};
use crate::label;
use crate::scorer::{Observation, ObservationSpace, Scorer};
use crate::weight::Weight;

/// Longest cycle the exhaustive search accepts.
pub const CENTER_GUARD: usize = 6;

/// A word `x_{1:n}` with `x_1 = x_n` whose segment maximum is dominated by the
/// target's diagonal entry, and the center part built from it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterCandidate {
    #[serde(serialize_with = "label::one")]
    pub target: usize,
    pub cycle: Vec<Observation>,
    /// `2N` copies of `x_{1:n-1}` followed by `x_n`.
    pub center: Vec<Observation>,
    /// `1 - max_{i,j ≠ c} p_ij / p_cc`.
    pub epsilon: f64,
    /// `p_cc > p_ic` for all `i ≠ c`.
    pub column_strict: bool,
    /// `p_cc > p_ci` for all `i ≠ c`.
    pub row_strict: bool,
    /// `p_cc > p_ij` for every `(i, j) ≠ (c, c)`.
    pub fully_strict: bool,
}

fn odometer(word: &mut [usize], base: usize) -> bool {
    for d in word.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Words `x_{1:n}`, `2 ≤ n ≤ max_len`, `x_1 = x_n`, with `p_cc > p_ij` for `i, j ≠ c`,
/// `p_cc ≥ p_ic` and `p_cc ≥ p_ci` for all `i`, one of the last two families strict.
/// `c` is state 0, or every state in turn when `relabel` is set.
pub fn find_cyclic_center<S: Scorer + ?Sized>(
    model: &S,
    max_len: usize,
    cycles: usize,
    relabel: bool,
) -> Result<Vec<CenterCandidate>> {
    let ObservationSpace::Discrete { symbols } = model.observation_space() else {
        return Err(Error::Unsupported("cyclic center search needs a discrete observation space".into()));
    };
    if max_len > CENTER_GUARD {
        return Err(Error::Guard {
            what: "cycle length",
            actual: max_len as u128,
            limit: CENTER_GUARD as u128,
        });
    }
    let s = model.num_states();
    let targets: Vec<usize> = if relabel { (0..s).collect() } else { vec![0] };
    let mut out = Vec::new();
    for &c in &targets {
        for n in 2..=max_len {
            let mut inner = vec![0usize; n - 1];
            loop {
                let mut word = inner.clone();
                word.push(inner[0]);
                let obs: Vec<Observation> = word.iter().map(|&x| Observation::Symbol(x)).collect();
                let seg = segment_max(model, &obs)?;
                let p = seg.get(c, c);
                if !p.is_zero() {
                    let others = (0..s).filter(|&i| i != c);
                    let col_ok = others.clone().all(|i| p.at_least(seg.get(i, c)));
                    let row_ok = others.clone().all(|i| p.at_least(seg.get(c, i)));
                    let column_strict = others.clone().all(|i| p.exceeds(seg.get(i, c)));
                    let row_strict = others.clone().all(|i| p.exceeds(seg.get(c, i)));
                    let inner_strict = others.clone().all(|i| others.clone().all(|j| p.exceeds(seg.get(i, j))));
                    if col_ok && row_ok && inner_strict && (column_strict || row_strict) {
                        let worst = others
                            .clone()
                            .flat_map(|i| others.clone().map(move |j| (i, j)))
                            .map(|(i, j)| seg.get(i, j).ln() - p.ln())
                            .fold(f64::NEG_INFINITY, f64::max);
                        let mut center = Vec::with_capacity(2 * cycles * (n - 1) + 1);
                        for _ in 0..2 * cycles {
                            center.extend_from_slice(&obs[..n - 1]);
                        }
                        center.push(obs[n - 1].clone());
                        out.push(CenterCandidate {
                            target: c,
                            cycle: obs,
                            center,
                            epsilon: 1.0 - worst.exp(),
                            column_strict,
                            row_strict,
                            fully_strict: column_strict && row_strict,
                        });
                    }
                }
                if !odometer(&mut inner, symbols) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;

    #[test]
    fn two_state_cycle_and_margin() {
        let m = canonical::two_state_pmm().exact().unwrap();
        let found = find_cyclic_center(&m, 2, 2, false).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].cycle, vec![Observation::Symbol(0); 2]);
        assert_eq!(found[0].center.len(), 5);
        assert!((found[0].epsilon - 0.125).abs() < 1e-12);
        assert!(found[0].fully_strict);
    }

    #[test]
    fn example_1_1_has_the_one_one_cycle() {
        let m = canonical::example_1_1().exact().unwrap();
        let found = find_cyclic_center(&m, 3, 2, false).unwrap();
        assert_eq!(found[0].cycle, vec![Observation::Symbol(0); 2]);
    }

    #[test]
    fn guard() {
        let m = canonical::two_state_pmm();
        assert!(matches!(find_cyclic_center(&m, 7, 2, false), Err(Error::Guard { .. })));
    }
}
