use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{first_failure, irreducible, primitivity, ConditionItem, Primitivity};
use crate::error::{Error, Result};
use crate::label;
use crate::model::{Emissions, Hmm, ModelSpec};
use crate::prob::{prob_to_f64, Prob};

/// Largest state count for the subset enumeration.
pub const CLUSTER_GUARD: usize = 12;

/// Condition (i) for one state `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionIState {
    #[serde(serialize_with = "label::one")]
    pub state: usize,
    /// Symbols `x` with `f_j(x)·p_·j > max_{i≠j} f_i(x)·p_·i`.
    #[serde(serialize_with = "label::many")]
    pub symbols: Vec<usize>,
    /// Best `ln(f_j(x)·p_·j) - ln(max_{i≠j} f_i(x)·p_·i)` over all symbols.
    #[serde(serialize_with = "label::ln")]
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionIReport {
    /// `p_·j = max_i p_ij`.
    #[serde(serialize_with = "label::prob_column")]
    pub column_max: Vec<Prob>,
    /// `[state][symbol]` of `f_i(x)·p_·i`.
    #[serde(serialize_with = "label::prob_rows")]
    pub scores: Vec<Vec<Prob>>,
    pub states: Vec<ConditionIState>,
    pub pass: bool,
}

impl ConditionIReport {
    /// Every listed symbol still satisfies the strict inequality.
    pub fn reverify(&self) -> bool {
        self.states.iter().all(|st| {
            st.symbols.iter().all(|&x| {
                let lhs = &self.scores[st.state][x];
                (0..self.scores.len())
                    .filter(|&i| i != st.state)
                    .all(|i| lhs > &self.scores[i][x])
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterCandidate {
    #[serde(serialize_with = "label::many")]
    pub states: Vec<usize>,
    pub cluster: bool,
    pub weak_cluster: bool,
    /// Primitivity of `P` restricted to the candidate.
    pub restricted: Primitivity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterReport {
    /// `G_i = {x : f_i(x) > 0}`, 1-based symbols.
    pub supports: Vec<Vec<usize>>,
    /// Weak clusters, clusters flagged; non-weak subsets are omitted.
    pub candidates: Vec<ClusterCandidate>,
}

impl ClusterReport {
    pub fn clusters(&self) -> impl Iterator<Item = &ClusterCandidate> {
        self.candidates.iter().filter(|c| c.cluster)
    }

    pub fn weak_clusters(&self) -> impl Iterator<Item = &ClusterCandidate> {
        self.candidates.iter().filter(|c| c.weak_cluster)
    }

    pub fn primitive_weak_cluster(&self) -> Option<&ClusterCandidate> {
        self.weak_clusters().find(|c| c.restricted.primitive)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HmmCorollaryReport {
    pub condition_i: ConditionIReport,
    pub clusters: ClusterReport,
    pub irreducible: bool,
    pub items: Vec<ConditionItem>,
    pub overall: bool,
}

impl HmmCorollaryReport {
    pub fn first_failure(&self) -> Option<&ConditionItem> {
        first_failure(&self.items)
    }
}

fn discrete_hmm(model: &ModelSpec) -> Result<(Hmm, Vec<Vec<Prob>>)> {
    let hmm = model
        .to_hmm()?
        .ok_or_else(|| Error::Unsupported("the kernel does not factorize as p_ij f_j(x)".into()))?;
    match &hmm.emissions {
        Emissions::Discrete(f) => {
            let f = f.clone();
            Ok((hmm, f))
        }
        Emissions::Gaussian(_) => Err(Error::Unsupported("the HMM checks need discrete emissions".into())),
    }
}

fn ln_ratio(a: &Prob, b: &Prob) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => f64::NEG_INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => prob_to_f64(&(a / b)).ln(),
    }
}

fn condition_i(p: &[Vec<Prob>], f: &[Vec<Prob>]) -> ConditionIReport {
    let s = p.len();
    let nx = f[0].len();
    let column_max: Vec<Prob> = (0..s)
        .map(|j| (0..s).map(|i| p[i][j].clone()).max().expect("non-empty"))
        .collect();
    let scores: Vec<Vec<Prob>> = (0..s).map(|i| f[i].iter().map(|v| v * &column_max[i]).collect()).collect();
    let states: Vec<ConditionIState> = (0..s)
        .map(|j| {
            let mut symbols = Vec::new();
            let mut margin = f64::NEG_INFINITY;
            for x in 0..nx {
                let rival = (0..s).filter(|&i| i != j).map(|i| scores[i][x].clone()).max().unwrap_or_else(Prob::zero);
                if s == 1 || scores[j][x] > rival {
                    symbols.push(x);
                }
                margin = margin.max(if s == 1 { f64::INFINITY } else { ln_ratio(&scores[j][x], &rival) });
            }
            ConditionIState {
                state: j,
                pass: !symbols.is_empty(),
                symbols,
                margin,
            }
        })
        .collect();
    ConditionIReport {
        pass: states.iter().all(|s| s.pass),
        column_max,
        scores,
        states,
    }
}

fn clusters(p: &[Vec<Prob>], f: &[Vec<Prob>]) -> Result<ClusterReport> {
    let s = p.len();
    if s > CLUSTER_GUARD {
        return Err(Error::Guard {
            what: "state count for cluster enumeration",
            actual: s as u128,
            limit: CLUSTER_GUARD as u128,
        });
    }
    let nx = f[0].len();
    let supports: Vec<Vec<bool>> = f.iter().map(|row| row.iter().map(|v| !v.is_zero()).collect()).collect();
    let candidates: Vec<ClusterCandidate> = (1u32..1 << s)
        .into_par_iter()
        .filter_map(|mask| {
            let members: Vec<usize> = (0..s).filter(|&i| mask & (1 << i) != 0).collect();
            let inside = |x: usize| members.iter().all(|&i| supports[i][x]);
            let outside = |x: usize| (0..s).any(|i| mask & (1 << i) == 0 && supports[i][x]);
            let any_common = (0..nx).any(inside);
            let cluster = any_common && !(0..nx).any(|x| inside(x) && outside(x));
            let weak_cluster = (0..nx).any(|x| inside(x) && !outside(x));
            if !weak_cluster && !cluster {
                return None;
            }
            let sub: Vec<Vec<Prob>> = members
                .iter()
                .map(|&i| members.iter().map(|&j| p[i][j].clone()).collect())
                .collect();
            Some(ClusterCandidate {
                restricted: primitivity(&sub),
                states: members,
                cluster,
                weak_cluster,
            })
        })
        .collect();
    Ok(ClusterReport {
        supports: supports
            .iter()
            .map(|row| (0..nx).filter(|&x| row[x]).map(|x| x + 1).collect())
            .collect(),
        candidates,
    })
}

/// Corollary for discrete HMMs: condition (i) for every state, a weak cluster
/// `C` with `P_C` primitive, and `Y` irreducible.
pub fn check_hmm_corollary(model: &ModelSpec) -> Result<HmmCorollaryReport> {
    let (hmm, f) = discrete_hmm(model)?;
    let p = &hmm.transitions;
    let condition_i = condition_i(p, &f);
    let clusters = clusters(p, &f)?;
    let irreducible = irreducible(p);
    let mut items: Vec<ConditionItem> = condition_i
        .states
        .iter()
        .map(|st| {
            ConditionItem::new(
                format!("condition_i_state_{}", st.state + 1),
                st.pass,
                Some(st.margin),
                (!st.symbols.is_empty()).then(|| format!("symbols {:?}", st.symbols.iter().map(|x| x + 1).collect::<Vec<_>>())),
            )
        })
        .collect();
    let prim = clusters.primitive_weak_cluster();
    items.push(ConditionItem::new(
        "primitive_weak_cluster",
        prim.is_some(),
        None,
        prim.map(|c| {
            format!(
                "states {:?}, R = {}",
                c.states.iter().map(|i| i + 1).collect::<Vec<_>>(),
                c.restricted.exponent.unwrap_or(0)
            )
        }),
    ));
    items.push(ConditionItem::new("irreducibility", irreducible, None, None));
    let overall = items.iter().all(|i| i.pass);
    Ok(HmmCorollaryReport {
        condition_i,
        clusters,
        irreducible,
        items,
        overall,
    })
}

/// Two-state discrete HMM with `f_1(x) ≠ f_2(x)` for some symbol.
pub fn two_state_hmm_distinct_emissions(model: &ModelSpec) -> Result<bool> {
    let (hmm, f) = discrete_hmm(model)?;
    if hmm.transitions.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected two hidden states, found {}",
            hmm.transitions.len()
        )));
    }
    Ok(f[0] != f[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::prob::parse_prob;

    fn r(s: &str) -> Prob {
        parse_prob(s).unwrap()
    }

    #[test]
    fn example_1_1_fails_condition_i_at_state_three() {
        let rep = check_hmm_corollary(&canonical::example_1_1_hmm()).unwrap();
        assert!(!rep.overall);
        assert_eq!(rep.first_failure().unwrap().name, "condition_i_state_3");
        assert_eq!(rep.condition_i.scores[0], vec![r("0.6875"), r("0.1875")]);
        assert_eq!(rep.condition_i.scores[2], vec![r("0.125"), r("0.125")]);
        assert!(rep.condition_i.states[0].pass && rep.condition_i.states[1].pass);
        assert!((2..6).all(|j| !rep.condition_i.states[j].pass));
        assert!(rep.condition_i.reverify());
    }

    #[test]
    fn example_1_1_full_set_is_the_only_weak_cluster_and_not_primitive() {
        let rep = check_hmm_corollary(&canonical::example_1_1_hmm()).unwrap();
        let weak: Vec<_> = rep.clusters.weak_clusters().collect();
        assert_eq!(weak.len(), 1);
        assert_eq!(weak[0].states, (0..6).collect::<Vec<_>>());
        assert!(!weak[0].restricted.primitive);
        assert!(!rep.irreducible);
    }

    #[test]
    fn example_1_2_is_reducible() {
        let rep = check_hmm_corollary(&canonical::example_1_2()).unwrap();
        assert!(rep.condition_i.pass);
        assert!(!rep.irreducible);
        assert!(!rep.overall);
        let failing: Vec<_> = rep.items.iter().filter(|i| !i.pass).map(|i| i.name.as_str()).collect();
        assert!(failing.contains(&"irreducibility"));
    }

    #[test]
    fn clusters_are_weak_clusters() {
        for m in [canonical::example_1_1_hmm(), canonical::example_1_2(), canonical::tiebreak_4state()] {
            let rep = check_hmm_corollary(&m).unwrap();
            assert!(rep.clusters.clusters().all(|c| c.weak_cluster));
        }
    }

    #[test]
    fn distinct_emissions() {
        assert!(two_state_hmm_distinct_emissions(&canonical::example_1_2()).unwrap());
        assert!(two_state_hmm_distinct_emissions(&canonical::example_1_1_hmm()).is_err());
    }
}
