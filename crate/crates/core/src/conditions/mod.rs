//! Machine checks of the sufficient conditions for infinitely many barriers:
//! the HMM corollary (condition (i), weak clusters, primitivity), the discrete
//! PMM corollary (subpositivity, cyclic centers, irreducibility) and the
//! Gaussian linear switching corollary (dominance, H_ij sets, drift).
//!
//! Irreducibility of the joint chain is replaced by reachability on the finite
//! chain (discrete) or primitivity of `P` with everywhere-positive Gaussian
//! densities (linear switching).

mod discrete;
mod glm;
mod hmm;
mod primitivity;

use serde::Serialize;

pub use discrete::{check_discrete_corollary, DiscreteCorollaryReport, RectangleWitness, DISCRETE_DEPTH_GUARD};
pub use glm::{check_glm_corollary, GlmConditionReport, HSet};
pub use hmm::{
    check_hmm_corollary, two_state_hmm_distinct_emissions, ClusterCandidate, ClusterReport, ConditionIReport,
    ConditionIState, HmmCorollaryReport, CLUSTER_GUARD,
};
pub use primitivity::{irreducible, primitivity, Primitivity};

/// One itemized condition in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionItem {
    pub name: String,
    pub pass: bool,
    /// Positive when the condition holds with room to spare; `None` for purely combinatorial items.
    pub margin: Option<f64>,
    pub witness: Option<String>,
}

impl ConditionItem {
    fn new(name: impl Into<String>, pass: bool, margin: Option<f64>, witness: Option<String>) -> Self {
        ConditionItem {
            name: name.into(),
            pass,
            margin,
            witness,
        }
    }
}

pub(crate) fn first_failure(items: &[ConditionItem]) -> Option<&ConditionItem> {
    items.iter().find(|i| !i.pass)
}
