//! Seeded, platform-independent trajectory sampling.
//!
//! Randomness is counter based: the uniform used for coordinate `c` at time
//! step `t` is a pure function of `(seed, t, c)`, built from the SplitMix64
//! finalizer. Coordinate 0 drives the discrete draw of a step (the hidden
//! state, or the joint `(x, y)` of a discrete model); coordinates `2k+1, 2k+2`
//! feed the Box–Muller transform for the `k`-th standard normal component.
//! Only IEEE-exact operations and `libm` are used, so the output is
//! bit-identical across platforms.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{Emissions, Gaussian, ModelKind, ModelSpec};
use crate::prob::{prob_to_f64, Prob};
use crate::scorer::Observation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// Counter-based generator; see the module docs for the stream-splitting rule.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: Seed) -> Self {
        CounterRng { key: splitmix(seed.0) }
    }

    pub fn bits(&self, step: u64, coord: u64) -> u64 {
        splitmix(splitmix(self.key ^ step) ^ coord.wrapping_mul(0xD1B5_4A32_D192_ED03))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&self, step: u64, coord: u64) -> f64 {
        (self.bits(step, coord) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller on coordinates `2k+1` and `2k+2`.
    pub fn normal(&self, step: u64, k: u64) -> f64 {
        let u1 = 1.0 - self.uniform(step, 2 * k + 1);
        let u2 = self.uniform(step, 2 * k + 2);
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
    }

    pub fn below(&self, step: u64, coord: u64, n: u64) -> u64 {
        ((self.uniform(step, coord) * n as f64) as u64).min(n - 1)
    }
}

/// A sampled path of the joint chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub observations: Vec<Observation>,
    pub hidden: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.hidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hidden.is_empty()
    }
}

/// Cumulative distribution over a fixed index order.
#[derive(Clone, Debug)]
struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        Cdf(probs
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect())
    }

    fn from_probs<'a>(probs: impl IntoIterator<Item = &'a Prob>) -> Self {
        Cdf::new(probs.into_iter().map(prob_to_f64))
    }

    /// First index with `u < F(i)`; rounding slack goes to the last index with positive mass.
    fn draw(&self, u: f64) -> usize {
        let target = u * self.0.last().copied().unwrap_or(1.0);
        match self.0.iter().position(|&c| target < c) {
            Some(i) => i,
            None => {
                let mut i = self.0.len() - 1;
                while i > 0 && self.0[i] == self.0[i - 1] {
                    i -= 1;
                }
                i
            }
        }
    }
}

fn sample_gaussian(g: &Gaussian, rng: &CounterRng, step: u64) -> DVector<f64> {
    let d = g.dim();
    let z = DVector::from_iterator(d, (0..d as u64).map(|k| rng.normal(step, k)));
    g.mean() + g.cholesky_l() * z
}

/// Draws `steps` consecutive states of the joint chain.
pub fn simulate(model: &ModelSpec, steps: usize, seed: Seed) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let rng = CounterRng::new(seed);
    let mut observations = Vec::with_capacity(steps);
    let mut hidden: Vec<usize> = Vec::with_capacity(steps);
    match model.kind() {
        ModelKind::Hmm(h) if matches!(h.emissions, Emissions::Gaussian(_)) => {
            let Emissions::Gaussian(laws) = &h.emissions else { unreachable!() };
            let rows: Vec<Cdf> = h.transitions.iter().map(Cdf::from_probs).collect();
            let init = Cdf::from_probs(&h.initial_hidden);
            for t in 0..steps {
                let u = rng.uniform(t as u64, 0);
                let y = if t == 0 { init.draw(u) } else { rows[hidden[t - 1]].draw(u) };
                let x = sample_gaussian(&laws[y], &rng, t as u64);
                hidden.push(y);
                observations.push(Observation::Point(x.iter().copied().collect()));
            }
        }
        ModelKind::GaussianLinearSwitching(g) => {
            let rows: Vec<Cdf> = g.transitions.iter().map(Cdf::from_probs).collect();
            let init = Cdf::from_probs(&g.initial_hidden);
            let mut prev = DVector::zeros(g.dim());
            for t in 0..steps {
                let u = rng.uniform(t as u64, 0);
                let (y, x) = if t == 0 {
                    let y = init.draw(u);
                    (y, sample_gaussian(&g.initial_x[y], &rng, 0))
                } else {
                    let y = rows[hidden[t - 1]].draw(u);
                    (y, &g.f[y] * &prev + sample_gaussian(&g.noise[y], &rng, t as u64))
                };
                hidden.push(y);
                observations.push(Observation::Point(x.iter().copied().collect()));
                prev = x;
            }
        }
        _ => {
            let table = model.to_generic()?;
            let (nx, ny) = (table.symbols(), table.states());
            // joint index z = y·|X| + x
            let init = Cdf::new((0..nx * ny).map(|z| prob_to_f64(table.init(z % nx, z / nx))));
            let rows: Vec<Cdf> = (0..nx * ny)
                .map(|zp| {
                    let (xp, yp) = (zp % nx, zp / nx);
                    Cdf::new((0..nx * ny).map(|z| prob_to_f64(table.q(xp, yp, z % nx, z / nx))))
                })
                .collect();
            let mut z = 0;
            for t in 0..steps {
                let u = rng.uniform(t as u64, 0);
                z = if t == 0 { init.draw(u) } else { rows[z].draw(u) };
                hidden.push(z / nx);
                observations.push(Observation::Symbol(z % nx));
            }
        }
    }
    Ok(Trajectory { observations, hidden })
}
