use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scorer::{Observation, Scorer};
use crate::weight::Weight;

use super::{check_input, path_score, Decoded, Diagnostic};

/// Largest number of paths the oracle will enumerate.
pub const ORACLE_GUARD: u128 = 10_000_000;

/// Exhaustive search over all `|Y|^n` paths. Among maximizers the
/// lexicographically smallest is returned.
pub fn brute_force_oracle<S: Scorer + ?Sized>(
    model: &S,
    obs: &[Observation],
    start_pin: Option<usize>,
    end_pin: Option<usize>,
    include_initial: bool,
) -> Result<Decoded<S::W>> {
    check_input(model, obs)?;
    let s = model.num_states();
    let n = obs.len();
    let total = (s as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > ORACLE_GUARD {
        return Err(Error::Guard {
            what: "oracle path count",
            actual: total,
            limit: ORACLE_GUARD,
        });
    }
    let mut path = vec![0usize; n];
    let mut best: Option<(S::W, Vec<usize>)> = None;
    let mut maximizers = 0usize;
    loop {
        let ok = start_pin.is_none_or(|y| path[0] == y) && end_pin.is_none_or(|y| path[n - 1] == y);
        if ok {
            let w = path_score(model, obs, &path, include_initial);
            match &best {
                None => {
                    best = Some((w, path.clone()));
                    maximizers = 1;
                }
                Some((b, _)) => match w.tie_cmp(b) {
                    Ordering::Greater => {
                        best = Some((w, path.clone()));
                        maximizers = 1;
                    }
                    Ordering::Equal => maximizers += 1,
                    Ordering::Less => {}
                },
            }
        }
        // odometer with y_n fastest, so paths are visited in lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                let (score, path) = best.unwrap_or_else(|| (S::W::zero(), Vec::new()));
                if score.is_zero() {
                    return Ok(Decoded {
                        path: Vec::new(),
                        score,
                        final_ties: 0,
                        diagnostic: Some(Diagnostic::ZeroLikelihood { t: n }),
                    });
                }
                return Ok(Decoded {
                    path,
                    score,
                    final_ties: maximizers,
                    diagnostic: None,
                });
            }
            k -= 1;
            path[k] += 1;
            if path[k] < s {
                break;
            }
            path[k] = 0;
        }
    }
}
