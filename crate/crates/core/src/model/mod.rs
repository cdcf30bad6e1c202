//! Pairwise Markov model specifications.
//!
//! A [`ModelSpec`] is the single source of the kernel `q(x, y | x', y')` and of
//! the initial density `p(x₁, y₁)`. Discrete probabilities are kept as exact
//! rationals; the float log tables used by the default decoder are compiled
//! once at construction.
//!
//! Internally states and symbols are 0-based. State `0` is the distinguished
//! state that the literature calls state 1.

mod exact;
mod gaussian;
mod json;
mod pair;
mod two_state;

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};

pub use exact::ExactModel;
pub use gaussian::Gaussian;
pub use json::{load_model, load_model_file, model_to_json, save_model_file};
pub use pair::{pair_model, pair_observations, PairedModel};
pub use two_state::{build_two_state_pmm, TwoStatePmmParams};

use crate::error::{Error, Result};
use crate::prob::{prob_to_f64, prob_to_string, Prob};
use crate::scorer::{Observation, ObservationSpace, Scorer};
use crate::weight::LogWeight;

/// Allowed deviation of a probability row sum from one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Number of hidden states, labelled `0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpace {
    pub count: usize,
}

/// Fully general discrete kernel over `X × Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericDiscrete {
    symbols: usize,
    states: usize,
    // index ((x'·|X| + x)·|Y| + y')·|Y| + y, so each |Y|×|Y| step block is contiguous
    kernel: Vec<Prob>,
    // index x·|Y| + y
    initial: Vec<Prob>,
}

impl GenericDiscrete {
    pub fn from_fn(
        symbols: usize,
        states: usize,
        kernel: impl Fn(usize, usize, usize, usize) -> Prob,
        initial: impl Fn(usize, usize) -> Prob,
    ) -> Self {
        let mut k = Vec::with_capacity(symbols * symbols * states * states);
        for xp in 0..symbols {
            for x in 0..symbols {
                for yp in 0..states {
                    for y in 0..states {
                        k.push(kernel(xp, yp, x, y));
                    }
                }
            }
        }
        let mut init = Vec::with_capacity(symbols * states);
        for x in 0..symbols {
            for y in 0..states {
                init.push(initial(x, y));
            }
        }
        GenericDiscrete {
            symbols,
            states,
            kernel: k,
            initial: init,
        }
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn states(&self) -> usize {
        self.states
    }

    fn idx(&self, xp: usize, yp: usize, x: usize, y: usize) -> usize {
        ((xp * self.symbols + x) * self.states + yp) * self.states + y
    }

    /// `q(x, y | xp, yp)`
    pub fn q(&self, xp: usize, yp: usize, x: usize, y: usize) -> &Prob {
        &self.kernel[self.idx(xp, yp, x, y)]
    }

    /// `p(x₁ = x, y₁ = y)`
    pub fn init(&self, x: usize, y: usize) -> &Prob {
        &self.initial[x * self.states + y]
    }

    /// Row-major `|Y|×|Y|` block of `q(x, · | xp, ·)`.
    pub fn step_block(&self, xp: usize, x: usize) -> &[Prob] {
        let start = self.idx(xp, 0, x, 0);
        &self.kernel[start..start + self.states * self.states]
    }

    fn validate(&self) -> Result<()> {
        if self.symbols == 0 || self.states == 0 {
            return Err(Error::Schema("symbol and state counts must be positive".into()));
        }
        let mut row = 0;
        for xp in 0..self.symbols {
            for yp in 0..self.states {
                row += 1;
                let mut sum = Prob::zero();
                for x in 0..self.symbols {
                    for y in 0..self.states {
                        let v = self.q(xp, yp, x, y);
                        check_range(v, "kernel")?;
                        sum += v;
                    }
                }
                check_sum(&sum, "kernel", row)?;
            }
        }
        check_row(&self.initial, "initial", 1)
    }
}

#[derive(Clone, Debug)]
pub enum Emissions {
    /// `[state][symbol]`
    Discrete(Vec<Vec<Prob>>),
    Gaussian(Vec<Gaussian>),
}

#[derive(Clone, Debug)]
pub struct Hmm {
    pub transitions: Vec<Vec<Prob>>,
    pub emissions: Emissions,
    pub initial_hidden: Vec<Prob>,
    /// Law of `x₁` given `y₁` when it differs from the emission law (discrete only).
    pub initial_emissions: Option<Vec<Vec<Prob>>>,
}

#[derive(Clone, Debug)]
pub struct DiscreteSwitching {
    pub transitions: Vec<Vec<Prob>>,
    /// `[state][previous symbol][symbol]`
    pub emissions: Vec<Vec<Vec<Prob>>>,
    pub initial_hidden: Vec<Prob>,
    /// `[state][symbol]`
    pub initial_emissions: Vec<Vec<Prob>>,
}

/// `X_k = F(Y_k) X_{k-1} + ξ_k(Y_k)` with Gaussian `ξ(j) ~ N(μ_j, Σ_j)`.
#[derive(Clone, Debug)]
pub struct GaussianLinearSwitching {
    pub transitions: Vec<Vec<Prob>>,
    pub f: Vec<DMatrix<f64>>,
    pub noise: Vec<Gaussian>,
    pub initial_hidden: Vec<Prob>,
    /// Law of `x₁` given `y₁`.
    pub initial_x: Vec<Gaussian>,
}

impl GaussianLinearSwitching {
    pub fn dim(&self) -> usize {
        self.noise[0].dim()
    }
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    GenericDiscrete(GenericDiscrete),
    Hmm(Hmm),
    DiscreteSwitching(DiscreteSwitching),
    GaussianLinearSwitching(GaussianLinearSwitching),
}

#[derive(Clone, Debug)]
enum Compiled {
    Discrete {
        symbols: usize,
        kernel: Vec<f64>,
        initial: Vec<f64>,
    },
    Continuous {
        log_trans: Vec<f64>,
        log_init: Vec<f64>,
    },
}

/// A validated pairwise Markov model. Immutable once built.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    name: Option<String>,
    kind: ModelKind,
    states: usize,
    space: ObservationSpace,
    compiled: Compiled,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Result<Self> {
        validate(&kind)?;
        let (states, space) = shape(&kind);
        let compiled = match &kind {
            ModelKind::Hmm(Hmm {
                transitions,
                emissions: Emissions::Gaussian(_),
                initial_hidden,
                ..
            })
            | ModelKind::GaussianLinearSwitching(GaussianLinearSwitching {
                transitions,
                initial_hidden,
                ..
            }) => Compiled::Continuous {
                log_trans: transitions.iter().flatten().map(ln_prob).collect(),
                log_init: initial_hidden.iter().map(ln_prob).collect(),
            },
            _ => {
                let table = discrete_table(&kind)?;
                Compiled::Discrete {
                    symbols: table.symbols,
                    kernel: table.kernel.iter().map(ln_prob).collect(),
                    initial: table.initial.iter().map(ln_prob).collect(),
                }
            }
        };
        Ok(ModelSpec {
            name: None,
            kind,
            states,
            space,
            compiled,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn state_space(&self) -> StateSpace {
        StateSpace { count: self.states }
    }

    pub fn is_discrete(&self) -> bool {
        self.space.is_discrete()
    }

    /// Hidden transition matrix, when the model has one.
    pub fn transitions(&self) -> Option<&[Vec<Prob>]> {
        match &self.kind {
            ModelKind::GenericDiscrete(_) => None,
            ModelKind::Hmm(h) => Some(&h.transitions),
            ModelKind::DiscreteSwitching(d) => Some(&d.transitions),
            ModelKind::GaussianLinearSwitching(g) => Some(&g.transitions),
        }
    }

    /// The kernel as an explicit table (discrete observation spaces only).
    pub fn to_generic(&self) -> Result<GenericDiscrete> {
        discrete_table(&self.kind)
    }

    /// Exact rational twin of this model for the [`Exact`](crate::weight::Exact) semiring.
    pub fn exact(&self) -> Result<ExactModel> {
        ExactModel::new(self)
    }

    /// Detects an HMM factorization `q(x, j | x', i) = p_ij f_j(x)` of a
    /// discrete model. Returns `None` when the kernel does not factorize.
    pub fn to_hmm(&self) -> Result<Option<Hmm>> {
        if let ModelKind::Hmm(h) = &self.kind {
            return Ok(Some(h.clone()));
        }
        let g = self.to_generic()?;
        Ok(factorize_hmm(&g))
    }

    /// The initial log density `log p(x₁, y₁)`.
    pub fn initial_log_density(&self, x: &Observation, y: usize) -> Result<LogWeight> {
        self.space.check(x)?;
        self.check_state(y)?;
        Ok(self.initial(x, y))
    }

    fn check_state(&self, y: usize) -> Result<()> {
        if y >= self.states {
            return Err(Error::InvalidArgument(format!(
                "state {} outside 1..={}",
                y + 1,
                self.states
            )));
        }
        Ok(())
    }

    fn emission_ln(&self, x: &Observation, y: usize, first: bool) -> f64 {
        match &self.kind {
            ModelKind::Hmm(Hmm {
                emissions: Emissions::Gaussian(g),
                ..
            }) => g[y].log_density_slice(x.point().expect("checked")),
            ModelKind::GaussianLinearSwitching(m) if first => {
                m.initial_x[y].log_density_slice(x.point().expect("checked"))
            }
            _ => unreachable!("emission_ln on a discrete model"),
        }
    }

    fn glm_residual_ln(m: &GaussianLinearSwitching, prev: &[f64], next: &[f64], y: usize) -> f64 {
        let d = prev.len();
        if d == 1 {
            let r = next[0] - m.f[y][(0, 0)] * prev[0];
            return m.noise[y].log_density_slice(&[r]);
        }
        let r = DVector::from_column_slice(next) - &m.f[y] * DVector::from_column_slice(prev);
        m.noise[y].log_density(&r)
    }
}

/// `log q(z_next | z_prev)` with validation of observations and states.
pub fn kernel_log_density(
    model: &ModelSpec,
    z_prev: (&Observation, usize),
    z_next: (&Observation, usize),
) -> Result<LogWeight> {
    model.space.check(z_prev.0)?;
    model.space.check(z_next.0)?;
    model.check_state(z_prev.1)?;
    model.check_state(z_next.1)?;
    Ok(model.transition(z_prev.0, z_prev.1, z_next.0, z_next.1))
}

impl Scorer for ModelSpec {
    type W = LogWeight;

    fn num_states(&self) -> usize {
        self.states
    }

    fn observation_space(&self) -> ObservationSpace {
        self.space
    }

    fn initial(&self, x: &Observation, y: usize) -> LogWeight {
        match &self.compiled {
            Compiled::Discrete { symbols, initial, .. } => match x.symbol() {
                Some(s) if s < *symbols => LogWeight::new(initial[s * self.states + y]),
                _ => LogWeight::ZERO,
            },
            Compiled::Continuous { log_init, .. } => {
                if log_init[y] == f64::NEG_INFINITY {
                    return LogWeight::ZERO;
                }
                LogWeight::new(log_init[y] + self.emission_ln(x, y, true))
            }
        }
    }

    fn transition(&self, prev: &Observation, prev_state: usize, next: &Observation, next_state: usize) -> LogWeight {
        let s = self.states;
        match &self.compiled {
            Compiled::Discrete { symbols, kernel, .. } => match (prev.symbol(), next.symbol()) {
                (Some(a), Some(b)) if a < *symbols && b < *symbols => {
                    LogWeight::new(kernel[((a * symbols + b) * s + prev_state) * s + next_state])
                }
                _ => LogWeight::ZERO,
            },
            Compiled::Continuous { log_trans, .. } => {
                let lp = log_trans[prev_state * s + next_state];
                if lp == f64::NEG_INFINITY {
                    return LogWeight::ZERO;
                }
                let e = match &self.kind {
                    ModelKind::GaussianLinearSwitching(m) => Self::glm_residual_ln(
                        m,
                        prev.point().expect("checked"),
                        next.point().expect("checked"),
                        next_state,
                    ),
                    _ => self.emission_ln(next, next_state, false),
                };
                LogWeight::new(lp + e)
            }
        }
    }

    fn step_weights(&self, prev: &Observation, next: &Observation) -> Vec<LogWeight> {
        let s = self.states;
        match &self.compiled {
            Compiled::Discrete { symbols, kernel, .. } => match (prev.symbol(), next.symbol()) {
                (Some(a), Some(b)) if a < *symbols && b < *symbols => {
                    let start = (a * symbols + b) * s * s;
                    kernel[start..start + s * s].iter().map(|&v| LogWeight::new(v)).collect()
                }
                _ => vec![LogWeight::ZERO; s * s],
            },
            Compiled::Continuous { log_trans, .. } => {
                let e: Vec<f64> = match &self.kind {
                    ModelKind::GaussianLinearSwitching(m) => {
                        let (p, n) = (prev.point().expect("checked"), next.point().expect("checked"));
                        (0..s).map(|y| Self::glm_residual_ln(m, p, n, y)).collect()
                    }
                    _ => (0..s).map(|y| self.emission_ln(next, y, false)).collect(),
                };
                let mut out = Vec::with_capacity(s * s);
                for i in 0..s {
                    for j in 0..s {
                        let lp = log_trans[i * s + j];
                        out.push(if lp == f64::NEG_INFINITY {
                            LogWeight::ZERO
                        } else {
                            LogWeight::new(lp + e[j])
                        });
                    }
                }
                out
            }
        }
    }
}

fn ln_prob(p: &Prob) -> f64 {
    if p.is_zero() {
        f64::NEG_INFINITY
    } else {
        crate::weight::ratio_ln(p)
    }
}

fn shape(kind: &ModelKind) -> (usize, ObservationSpace) {
    match kind {
        ModelKind::GenericDiscrete(g) => (g.states, ObservationSpace::Discrete { symbols: g.symbols }),
        ModelKind::Hmm(h) => {
            let space = match &h.emissions {
                Emissions::Discrete(e) => ObservationSpace::Discrete { symbols: e[0].len() },
                Emissions::Gaussian(g) => ObservationSpace::Euclidean { dim: g[0].dim() },
            };
            (h.transitions.len(), space)
        }
        ModelKind::DiscreteSwitching(d) => (
            d.transitions.len(),
            ObservationSpace::Discrete {
                symbols: d.emissions[0].len(),
            },
        ),
        ModelKind::GaussianLinearSwitching(g) => (g.transitions.len(), ObservationSpace::Euclidean { dim: g.dim() }),
    }
}

fn check_range(v: &Prob, what: &str) -> Result<()> {
    if v.is_negative() || *v > Prob::one() {
        return Err(Error::ProbabilityRange {
            what: what.to_string(),
            value: prob_to_string(v),
        });
    }
    Ok(())
}

fn check_sum(sum: &Prob, what: &str, row: usize) -> Result<()> {
    let deviation = prob_to_f64(&(sum - Prob::one())).abs();
    if deviation > ROW_SUM_TOLERANCE {
        return Err(Error::RowSum {
            what: what.to_string(),
            row,
            sum: prob_to_f64(sum),
            deviation,
        });
    }
    Ok(())
}

/// `row` is 1-based, used only for error messages.
fn check_row(values: &[Prob], what: &str, row: usize) -> Result<()> {
    let mut sum = Prob::zero();
    for v in values {
        check_range(v, what)?;
        sum += v;
    }
    check_sum(&sum, what, row)
}

fn check_stochastic(m: &[Vec<Prob>], cols: usize, what: &str) -> Result<()> {
    for (r, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Dimension(format!(
                "{what} row {} has {} entries, expected {cols}",
                r + 1,
                row.len()
            )));
        }
        check_row(row, what, r + 1)?;
    }
    Ok(())
}

fn check_hidden(transitions: &[Vec<Prob>], initial: &[Prob]) -> Result<usize> {
    let n = transitions.len();
    if n == 0 {
        return Err(Error::Schema("empty transition matrix".into()));
    }
    check_stochastic(transitions, n, "transitions")?;
    if initial.len() != n {
        return Err(Error::Dimension(format!(
            "initial_hidden has {} entries, expected {n}",
            initial.len()
        )));
    }
    check_row(initial, "initial_hidden", 1)?;
    Ok(n)
}

fn check_gaussians(g: &[Gaussian], n: usize, d: usize, what: &str) -> Result<()> {
    if g.len() != n {
        return Err(Error::Dimension(format!("{what}: {} laws for {n} states", g.len())));
    }
    if let Some(bad) = g.iter().find(|g| g.dim() != d) {
        return Err(Error::Dimension(format!("{what}: dimension {} but expected {d}", bad.dim())));
    }
    Ok(())
}

fn validate(kind: &ModelKind) -> Result<()> {
    match kind {
        ModelKind::GenericDiscrete(g) => g.validate(),
        ModelKind::Hmm(h) => {
            let n = check_hidden(&h.transitions, &h.initial_hidden)?;
            match &h.emissions {
                Emissions::Discrete(e) => {
                    if e.len() != n || e[0].is_empty() {
                        return Err(Error::Dimension("emission table must have one non-empty row per state".into()));
                    }
                    check_stochastic(e, e[0].len(), "emissions")?;
                    if let Some(ie) = &h.initial_emissions {
                        if ie.len() != n {
                            return Err(Error::Dimension("initial_emissions must have one row per state".into()));
                        }
                        check_stochastic(ie, e[0].len(), "initial_emissions")?;
                    }
                }
                Emissions::Gaussian(g) => {
                    if g.is_empty() {
                        return Err(Error::Dimension("no emission laws".into()));
                    }
                    check_gaussians(g, n, g[0].dim(), "gaussian_emissions")?;
                    if h.initial_emissions.is_some() {
                        return Err(Error::Unsupported(
                            "initial_emissions with Gaussian emissions".into(),
                        ));
                    }
                }
            }
            Ok(())
        }
        ModelKind::DiscreteSwitching(d) => {
            let n = check_hidden(&d.transitions, &d.initial_hidden)?;
            if d.emissions.len() != n || d.emissions[0].is_empty() {
                return Err(Error::Dimension("emission table must have one block per state".into()));
            }
            let x = d.emissions[0].len();
            for (j, block) in d.emissions.iter().enumerate() {
                if block.len() != x {
                    return Err(Error::Dimension(format!("emission block of state {} is not {x}x{x}", j + 1)));
                }
                check_stochastic(block, x, &format!("emissions of state {}", j + 1))?;
            }
            if d.initial_emissions.len() != n {
                return Err(Error::Dimension("initial_emissions must have one row per state".into()));
            }
            check_stochastic(&d.initial_emissions, x, "initial_emissions")
        }
        ModelKind::GaussianLinearSwitching(g) => {
            let n = check_hidden(&g.transitions, &g.initial_hidden)?;
            if g.noise.is_empty() {
                return Err(Error::Dimension("no noise laws".into()));
            }
            let d = g.dim();
            check_gaussians(&g.noise, n, d, "noise")?;
            check_gaussians(&g.initial_x, n, d, "initial_x")?;
            if g.f.len() != n {
                return Err(Error::Dimension(format!("{} F matrices for {n} states", g.f.len())));
            }
            if let Some((j, m)) = g.f.iter().enumerate().find(|(_, m)| m.nrows() != d || m.ncols() != d) {
                return Err(Error::Dimension(format!(
                    "F({}) is {}x{}, expected {d}x{d}",
                    j + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            if g.f.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Schema("non-finite entry in F".into()));
            }
            Ok(())
        }
    }
}

fn discrete_table(kind: &ModelKind) -> Result<GenericDiscrete> {
    match kind {
        ModelKind::GenericDiscrete(g) => Ok(g.clone()),
        ModelKind::Hmm(Hmm {
            transitions,
            emissions: Emissions::Discrete(e),
            initial_hidden,
            initial_emissions,
        }) => {
            let ie = initial_emissions.as_ref().unwrap_or(e);
            Ok(GenericDiscrete::from_fn(
                e[0].len(),
                transitions.len(),
                |_, yp, x, y| &transitions[yp][y] * &e[y][x],
                |x, y| &initial_hidden[y] * &ie[y][x],
            ))
        }
        ModelKind::DiscreteSwitching(d) => Ok(GenericDiscrete::from_fn(
            d.emissions[0].len(),
            d.transitions.len(),
            |xp, yp, x, y| &d.transitions[yp][y] * &d.emissions[y][xp][x],
            |x, y| &d.initial_hidden[y] * &d.initial_emissions[y][x],
        )),
        _ => Err(Error::Unsupported("explicit kernel table of a Euclidean model".into())),
    }
}

fn factorize_hmm(g: &GenericDiscrete) -> Option<Hmm> {
    let (nx, ny) = (g.symbols, g.states);
    let mut p = vec![vec![Prob::zero(); ny]; ny];
    for i in 0..ny {
        for j in 0..ny {
            let row_mass = |xp: usize| -> Prob { (0..nx).map(|x| g.q(xp, i, x, j).clone()).sum() };
            let m = row_mass(0);
            if (1..nx).any(|xp| row_mass(xp) != m) {
                return None;
            }
            p[i][j] = m;
        }
    }
    let mut f: Vec<Option<Vec<Prob>>> = vec![None; ny];
    for j in 0..ny {
        for i in 0..ny {
            if p[i][j].is_zero() {
                continue;
            }
            for xp in 0..nx {
                let col: Vec<Prob> = (0..nx).map(|x| g.q(xp, i, x, j) / &p[i][j]).collect();
                match &f[j] {
                    None => f[j] = Some(col),
                    Some(existing) if *existing == col => {}
                    Some(_) => return None,
                }
            }
        }
    }
    let mut pi = vec![Prob::zero(); ny];
    let mut ie = vec![vec![Prob::zero(); nx]; ny];
    for y in 0..ny {
        pi[y] = (0..nx).map(|x| g.init(x, y).clone()).sum();
        if !pi[y].is_zero() {
            for x in 0..nx {
                ie[y][x] = g.init(x, y) / &pi[y];
            }
        }
    }
    // States never entered keep their initial law as emission law (or uniform).
    let uniform = vec![Prob::new(1.into(), (nx as i64).into()); nx];
    let f: Vec<Vec<Prob>> = f
        .into_iter()
        .enumerate()
        .map(|(y, fy)| fy.unwrap_or_else(|| if pi[y].is_zero() { uniform.clone() } else { ie[y].clone() }))
        .collect();
    for y in 0..ny {
        if pi[y].is_zero() {
            ie[y] = f[y].clone();
        }
    }
    let initial_emissions = if ie == f { None } else { Some(ie) };
    Some(Hmm {
        transitions: p,
        emissions: Emissions::Discrete(f),
        initial_hidden: pi,
        initial_emissions,
    })
}
