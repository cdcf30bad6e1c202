//! Named, seeded experiment recipes. Output depends only on `(name, seed, steps)`.

use std::io::Write;

use serde::Serialize;

use crate::canonical;
use crate::dp::{decode, viterbi_path, DecodeOptions, Pins, TieRule};
use crate::error::{Error, Result};
use crate::io::write_records_csv;
use crate::model::ModelSpec;
use crate::nodes::{detect_node, scan_nodes};
use crate::online::{open_stream, DecoderConfig};
use crate::scorer::{symbols_1based, Observation};
use crate::simulate::{simulate, Seed};

pub const RECIPES: &[&str] = &["no-stabilize", "no-nodes", "tiebreak-pathology", "barrier-growth", "glm-growth"];

/// Word whose two inner nodes must not both break ties to the same state.
pub const PATHOLOGY_WORD: [usize; 7] = [1, 1, 2, 1, 1, 1, 1];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentRecipe {
    pub name: &'static str,
    pub model: &'static str,
    pub steps: usize,
    pub seed: u64,
    /// Node order scanned or used by the online decoder.
    pub order: usize,
    pub require_strong: bool,
}

impl ExperimentRecipe {
    pub fn new(name: &str, seed: u64) -> Result<Self> {
        let (name, model, steps, order, require_strong) = match name {
            "no-stabilize" => ("no-stabilize", "example_1_1", 100_000, 0, false),
            "no-nodes" => ("no-nodes", "example_1_2", 10_000, 10, false),
            "tiebreak-pathology" => ("tiebreak-pathology", "tiebreak_4state", 20, 3, false),
            "barrier-growth" => ("barrier-growth", "two_state_pmm", 100_000, 1, false),
            "glm-growth" => ("glm-growth", "glm_scalar", 10_000, 2, true),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown recipe '{other}'; known: {}",
                    RECIPES.join(", ")
                )))
            }
        };
        Ok(ExperimentRecipe {
            name,
            model,
            steps,
            seed,
            order,
            require_strong,
        })
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn model_spec(&self) -> ModelSpec {
        match self.model {
            "example_1_1" => canonical::example_1_1(),
            "example_1_2" => canonical::example_1_2(),
            "tiebreak_4state" => canonical::tiebreak_4state(),
            "two_state_pmm" => canonical::two_state_pmm(),
            _ => canonical::glm_scalar(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoStabilizeRow {
    pub n: usize,
    /// First state of the offline Viterbi path of `x_{1:n}`.
    pub first_state: usize,
    /// `1` if `n_1(x_{2:n}) ≥ n_2(x_{2:n})`, else `2`.
    pub majority_state: usize,
    /// Changes of the majority state over `k = 2..n`.
    pub flips_so_far: usize,
    /// Last `k ≤ n` at which it changed (0 if never).
    pub last_flip: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoNodesRow {
    pub order: usize,
    pub times_tested: usize,
    pub node_count: usize,
    pub strong_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathologyRow {
    pub time_a: usize,
    pub state_a: usize,
    pub time_b: usize,
    pub state_b: usize,
    pub log_likelihood: f64,
    pub node_a: bool,
    pub node_b: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub committed: usize,
    pub commits: usize,
    /// Commits whose node state is state 1.
    pub commits_state_1: usize,
    pub nodes_seen: usize,
    pub buffer_high_water: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentRows {
    NoStabilize(Vec<NoStabilizeRow>),
    NoNodes(Vec<NoNodesRow>),
    Pathology(Vec<PathologyRow>),
    Growth(Vec<GrowthRow>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub recipe: ExperimentRecipe,
    pub rows: ExperimentRows,
}

impl ExperimentOutput {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        match &self.rows {
            ExperimentRows::NoStabilize(r) => write_records_csv(r, out),
            ExperimentRows::NoNodes(r) => write_records_csv(r, out),
            ExperimentRows::Pathology(r) => write_records_csv(r, out),
            ExperimentRows::Growth(r) => write_records_csv(r, out),
        }
    }
}

pub fn run_experiment(recipe: &ExperimentRecipe) -> Result<ExperimentOutput> {
    let rows = match recipe.name {
        "no-stabilize" => ExperimentRows::NoStabilize(no_stabilize(recipe)?),
        "no-nodes" => ExperimentRows::NoNodes(no_nodes(recipe)?),
        "tiebreak-pathology" => ExperimentRows::Pathology(pathology(recipe)?),
        _ => ExperimentRows::Growth(growth(recipe)?),
    };
    Ok(ExperimentOutput {
        recipe: recipe.clone(),
        rows,
    })
}

/// Majority state after each prefix `x_{1:k}`, 0-based; `S_1 = 0` gives state 0.
pub fn majority_states(obs: &[Observation]) -> Vec<usize> {
    let mut s: i64 = 0;
    obs.iter()
        .enumerate()
        .map(|(k, o)| {
            if k > 0 {
                s += if o.symbol() == Some(0) { 1 } else { -1 };
            }
            usize::from(s < 0)
        })
        .collect()
}

/// Powers of two from `2^10` up to `n`, then `n` itself.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (10..=17).map(|e| 1usize << e).filter(|&c| c <= n).collect();
    if out.last() != Some(&n) {
        out.push(n);
    }
    out
}

fn no_stabilize(recipe: &ExperimentRecipe) -> Result<Vec<NoStabilizeRow>> {
    let model = recipe.model_spec();
    let traj = simulate(&model, recipe.steps, Seed(recipe.seed))?;
    let majority = majority_states(&traj.observations);
    let mut rows = Vec::new();
    for n in checkpoints(recipe.steps) {
        let dec = viterbi_path(&model, &traj.observations[..n], &TieRule::Lexicographic)?;
        let flips: Vec<usize> = (1..n).filter(|&k| majority[k] != majority[k - 1]).collect();
        rows.push(NoStabilizeRow {
            n,
            first_state: dec.path.first().map_or(0, |y| y + 1),
            majority_state: majority[n - 1] + 1,
            flips_so_far: flips.len(),
            last_flip: flips.last().map_or(0, |k| k + 1),
        });
    }
    Ok(rows)
}

fn no_nodes(recipe: &ExperimentRecipe) -> Result<Vec<NoNodesRow>> {
    let model = recipe.model_spec();
    let traj = simulate(&model, recipe.steps, Seed(recipe.seed))?;
    let reports = scan_nodes(&model, &traj.observations, recipe.order)?;
    Ok((0..=recipe.order)
        .map(|r| {
            let at: Vec<_> = reports.iter().filter(|x| x.order == r).collect();
            NoNodesRow {
                order: r,
                times_tested: at.len(),
                node_count: at.iter().filter(|x| x.is_node()).count(),
                strong_count: at.iter().filter(|x| x.is_strong()).count(),
            }
        })
        .collect())
}

fn pathology(recipe: &ExperimentRecipe) -> Result<Vec<PathologyRow>> {
    let model = recipe.model_spec().exact()?;
    let mut obs = if recipe.steps > 0 {
        simulate(&recipe.model_spec(), recipe.steps, Seed(recipe.seed))?.observations
    } else {
        Vec::new()
    };
    let start = obs.len();
    obs.extend(symbols_1based(&PATHOLOGY_WORD));
    let (ta, tb) = (start + 1, start + 3);
    let order = recipe.order;
    let mut rows = Vec::new();
    for sa in 0..2 {
        for sb in 0..2 {
            let dec = decode(&model, &obs, &Pins::new().with(ta, sa).with(tb, sb), &DecodeOptions::default())?;
            rows.push(PathologyRow {
                time_a: ta + 1,
                state_a: sa + 1,
                time_b: tb + 1,
                state_b: sb + 1,
                log_likelihood: dec.log_likelihood(),
                node_a: detect_node(&model, &obs[..=ta + order], ta)?.is_node_for(sa),
                node_b: detect_node(&model, &obs[..=tb + order], tb)?.is_node_for(sb),
            });
        }
    }
    Ok(rows)
}

fn growth(recipe: &ExperimentRecipe) -> Result<Vec<GrowthRow>> {
    let model = recipe.model_spec();
    let traj = simulate(&model, recipe.steps, Seed(recipe.seed))?;
    let mut cfg = DecoderConfig::new(recipe.order);
    cfg.require_strong = recipe.require_strong;
    let mut st = open_stream(&model, cfg);
    let every = (recipe.steps / 50).max(1);
    let mut rows = Vec::new();
    let mut state_1 = 0;
    for (k, o) in traj.observations.iter().enumerate() {
        if let Some(p) = st.push(o.clone())? {
            state_1 += usize::from(p.node_state == 0);
        }
        let n = k + 1;
        if n % every == 0 || n == recipe.steps {
            let d = st.diagnostics();
            rows.push(GrowthRow {
                n,
                committed: d.committed_len,
                commits: d.commits,
                commits_state_1: state_1,
                nodes_seen: d.nodes_seen,
                buffer_high_water: d.buffer_high_water,
            });
        }
    }
    Ok(rows)
}
