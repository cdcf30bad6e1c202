use crate::error::Result;
use crate::scorer::{Observation, ObservationSpace, Scorer};
use crate::weight::{Exact, Weight};

use super::{GenericDiscrete, ModelSpec};

/// Rational-arithmetic view of a discrete model.
#[derive(Clone, Debug)]
pub struct ExactModel {
    table: GenericDiscrete,
}

impl ExactModel {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        Ok(ExactModel {
            table: model.to_generic()?,
        })
    }

    pub fn from_table(table: GenericDiscrete) -> Self {
        ExactModel { table }
    }

    pub fn table(&self) -> &GenericDiscrete {
        &self.table
    }

    fn in_range(&self, x: &Observation) -> Option<usize> {
        x.symbol().filter(|&s| s < self.table.symbols)
    }
}

impl Scorer for ExactModel {
    type W = Exact;

    fn num_states(&self) -> usize {
        self.table.states
    }

    fn observation_space(&self) -> ObservationSpace {
        ObservationSpace::Discrete {
            symbols: self.table.symbols,
        }
    }

    fn initial(&self, x: &Observation, y: usize) -> Exact {
        match self.in_range(x) {
            Some(s) => Exact(self.table.init(s, y).clone()),
            None => Exact::zero(),
        }
    }

    fn transition(&self, prev: &Observation, prev_state: usize, next: &Observation, next_state: usize) -> Exact {
        match (self.in_range(prev), self.in_range(next)) {
            (Some(a), Some(b)) => Exact(self.table.q(a, prev_state, b, next_state).clone()),
            _ => Exact::zero(),
        }
    }

    fn step_weights(&self, prev: &Observation, next: &Observation) -> Vec<Exact> {
        let s = self.table.states;
        match (self.in_range(prev), self.in_range(next)) {
            (Some(a), Some(b)) => self.table.step_block(a, b).iter().cloned().map(Exact).collect(),
            _ => vec![Exact::zero(); s * s],
        }
    }
}
