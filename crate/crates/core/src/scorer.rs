//! The interface every dynamic program consumes: initial and one-step kernel
//! weights of a pairwise Markov model, in some [`Weight`] semiring.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::weight::Weight;

/// One observation: a discrete symbol (0-based) or a point of ℝ^d.
#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Symbol(usize),
    Point(Vec<f64>),
}

impl Observation {
    pub fn symbol(&self) -> Option<usize> {
        match self {
            Observation::Symbol(s) => Some(*s),
            Observation::Point(_) => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Observation::Point(p) => Some(p),
            Observation::Symbol(_) => None,
        }
    }
}

/// Symbols serialize 1-based, points as arrays.
impl Serialize for Observation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Observation::Symbol(x) => s.serialize_u64(*x as u64 + 1),
            Observation::Point(p) => p.serialize(s),
        }
    }
}

/// Wraps 0-based symbols as observations.
pub fn symbols(xs: &[usize]) -> Vec<Observation> {
    xs.iter().map(|&x| Observation::Symbol(x)).collect()
}

/// Wraps 1-based symbols (the labelling used in files and in the literature).
pub fn symbols_1based(xs: &[usize]) -> Vec<Observation> {
    xs.iter().map(|&x| Observation::Symbol(x - 1)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservationSpace {
    Discrete { symbols: usize },
    Euclidean { dim: usize },
}

impl ObservationSpace {
    /// Symbols outside `0..symbols` are legal (they carry zero mass); a
    /// symbol fed to a Euclidean model, or a point of the wrong dimension, is not.
    pub fn check(&self, obs: &Observation) -> Result<()> {
        match (self, obs) {
            (ObservationSpace::Discrete { .. }, Observation::Symbol(_)) => Ok(()),
            (ObservationSpace::Euclidean { dim }, Observation::Point(p)) if p.len() == *dim => Ok(()),
            (ObservationSpace::Euclidean { dim }, Observation::Point(p)) => Err(Error::Dimension(format!(
                "observation has dimension {}, model expects {dim}",
                p.len()
            ))),
            (ObservationSpace::Discrete { .. }, Observation::Point(_)) => {
                Err(Error::Dimension("vector observation given to a discrete model".into()))
            }
            (ObservationSpace::Euclidean { .. }, Observation::Symbol(_)) => {
                Err(Error::Dimension("symbol observation given to a Euclidean model".into()))
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, ObservationSpace::Discrete { .. })
    }
}

pub trait Scorer: Sync {
    type W: Weight;

    fn num_states(&self) -> usize;

    fn observation_space(&self) -> ObservationSpace;

    /// Joint initial density `p(x₁ = x, y₁ = y)`.
    fn initial(&self, x: &Observation, y: usize) -> Self::W;

    /// Kernel density `q(next, next_state | prev, prev_state)`.
    fn transition(&self, prev: &Observation, prev_state: usize, next: &Observation, next_state: usize) -> Self::W;

    fn initial_weights(&self, x: &Observation) -> Vec<Self::W> {
        (0..self.num_states()).map(|y| self.initial(x, y)).collect()
    }

    /// Row-major `|Y|×|Y|` matrix `w[i·|Y| + j] = q(next, j | prev, i)`.
    fn step_weights(&self, prev: &Observation, next: &Observation) -> Vec<Self::W> {
        let n = self.num_states();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.transition(prev, i, next, j));
            }
        }
        out
    }

    fn check_observations(&self, obs: &[Observation]) -> Result<()> {
        let space = self.observation_space();
        obs.iter().try_for_each(|o| space.check(o))
    }
}
