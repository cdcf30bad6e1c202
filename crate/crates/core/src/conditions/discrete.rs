use serde::Serialize;

use super::primitivity::reach;
use super::{first_failure, ConditionItem};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::nodes::{find_cyclic_center, CenterCandidate, YPlusSet};
use crate::scorer::Observation;

/// Longest word the exhaustive searches accept.
pub const DISCRETE_DEPTH_GUARD: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RectangleWitness {
    pub word: Vec<Observation>,
    pub y_plus: YPlusSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteCorollaryReport {
    /// Shortest word whose `Y⁺` is a full rectangle.
    pub subpositivity: Option<RectangleWitness>,
    /// First cyclic center whose column family is strict.
    pub center_column_strict: Option<CenterCandidate>,
    /// First cyclic center whose row family is strict.
    pub center_row_strict: Option<CenterCandidate>,
    /// Joint states reachable from the initial support, 1-based `(x, y)`.
    pub reachable: Vec<(usize, usize)>,
    /// The joint chain restricted to `reachable` is irreducible (hence recurrent).
    pub irreducible: bool,
    pub items: Vec<ConditionItem>,
    pub overall: bool,
}

impl DiscreteCorollaryReport {
    pub fn first_failure(&self) -> Option<&ConditionItem> {
        first_failure(&self.items)
    }
}

fn words(symbols: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = symbols.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut w = vec![0; len];
        for d in w.iter_mut().rev() {
            *d = code % symbols;
            code /= symbols;
        }
        w
    })
}

/// Corollary for discrete PMMs: a subpositive word, a cyclic center with the
/// dominance inequalities (either orientation strict), and an irreducible joint
/// chain on the reachable set. Searches words up to length `depth`.
pub fn check_discrete_corollary(model: &ModelSpec, depth: usize) -> Result<DiscreteCorollaryReport> {
    if depth > DISCRETE_DEPTH_GUARD {
        return Err(Error::Guard {
            what: "search depth",
            actual: depth as u128,
            limit: DISCRETE_DEPTH_GUARD as u128,
        });
    }
    let table = model.to_generic()?;
    let (nx, ny) = (table.symbols(), table.states());

    let mut subpositivity = None;
    'search: for q in 1..=depth {
        for w in words(nx, q) {
            let word: Vec<Observation> = w.into_iter().map(Observation::Symbol).collect();
            let y_plus = YPlusSet::of_segment(model, &word)?;
            if y_plus.is_rectangle() {
                subpositivity = Some(RectangleWitness { word, y_plus });
                break 'search;
            }
        }
    }

    let centers = if depth >= 2 { find_cyclic_center(model, depth, 1, true)? } else { Vec::new() };
    let center_column_strict = centers.iter().find(|c| c.column_strict).cloned();
    let center_row_strict = centers.iter().find(|c| c.row_strict).cloned();

    let n = nx * ny;
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            let (xp, yp) = (a / ny, a % ny);
            (0..n).map(|b| !num::Zero::is_zero(table.q(xp, yp, b / ny, b % ny))).collect()
        })
        .collect();
    let mut seen = vec![false; n];
    for (z, s) in seen.iter_mut().enumerate() {
        *s = !num::Zero::is_zero(table.init(z / ny, z % ny));
    }
    let starts: Vec<usize> = (0..n).filter(|&z| seen[z]).collect();
    for z in starts {
        for (v, r) in reach(&adj, z).into_iter().enumerate() {
            seen[v] |= r;
        }
    }
    let reachable_idx: Vec<usize> = (0..n).filter(|&z| seen[z]).collect();
    let irreducible = reachable_idx.iter().all(|&z| {
        let r = reach(&adj, z);
        reachable_idx.iter().all(|&w| r[w])
    });
    let reachable = reachable_idx.iter().map(|&z| (z / ny + 1, z % ny + 1)).collect();

    let describe = |c: &CenterCandidate| {
        format!(
            "state {}, cycle {:?}, epsilon {}",
            c.target + 1,
            c.cycle.iter().filter_map(Observation::symbol).map(|x| x + 1).collect::<Vec<_>>(),
            c.epsilon
        )
    };
    let items = vec![
        ConditionItem::new(
            "subpositivity",
            subpositivity.is_some(),
            None,
            subpositivity.as_ref().map(|w: &RectangleWitness| {
                format!("word {:?}", w.word.iter().filter_map(Observation::symbol).map(|x| x + 1).collect::<Vec<_>>())
            }),
        ),
        ConditionItem::new(
            "cyclic_center",
            center_column_strict.is_some() || center_row_strict.is_some(),
            centers.first().map(|c| c.epsilon),
            center_column_strict.as_ref().or(center_row_strict.as_ref()).map(describe),
        ),
        ConditionItem::new("irreducibility", irreducible, None, None),
    ];
    let overall = items.iter().all(|i| i.pass);
    Ok(DiscreteCorollaryReport {
        subpositivity,
        center_column_strict,
        center_row_strict,
        reachable,
        irreducible,
        items,
        overall,
    })
}
