use nalgebra::{DMatrix, DVector};
use num::Zero;

use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::scorer::Observation;

use super::{Emissions, GaussianLinearSwitching, Gaussian, GenericDiscrete, Hmm, ModelKind, ModelSpec};

/// The chain of consecutive pairs `Z'_k = (Z_{2k-1}, Z_{2k})`.
#[derive(Clone, Debug)]
pub struct PairedModel {
    pub model: ModelSpec,
    /// Paired state `k` stands for the original pair `pairs[k] = (i, j)`.
    pub pairs: Vec<(usize, usize)>,
    /// Discrete symbol count of the original model (paired symbol is `x₁·|X| + x₂`).
    pub symbols: Option<usize>,
}

impl PairedModel {
    pub fn pair_index(&self, i: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (i, j))
    }

    /// Splits a paired path back into the original state sequence.
    pub fn unpair_path(&self, path: &[usize]) -> Vec<usize> {
        path.iter().flat_map(|&k| [self.pairs[k].0, self.pairs[k].1]).collect()
    }
}

/// Groups observations in consecutive pairs; the length must be even.
pub fn pair_observations(obs: &[Observation], symbols: Option<usize>) -> Result<Vec<Observation>> {
    if !obs.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("cannot pair {} observations", obs.len())));
    }
    obs.chunks(2)
        .map(|c| match (&c[0], &c[1], symbols) {
            (Observation::Symbol(a), Observation::Symbol(b), Some(n)) => {
                if *a >= n || *b >= n {
                    Ok(Observation::Symbol(n * n))
                } else {
                    Ok(Observation::Symbol(a * n + b))
                }
            }
            (Observation::Point(a), Observation::Point(b), None) => {
                Ok(Observation::Point(a.iter().chain(b.iter()).copied().collect()))
            }
            _ => Err(Error::Dimension("observation kind does not match the paired model".into())),
        })
        .collect()
}

pub fn pair_model(model: &ModelSpec) -> Result<PairedModel> {
    match model.kind() {
        ModelKind::GenericDiscrete(g) => pair_generic(g, model),
        ModelKind::Hmm(h) => pair_hmm(h, model),
        ModelKind::GaussianLinearSwitching(g) => pair_glm(g, model),
        ModelKind::DiscreteSwitching(_) => Err(Error::Unsupported(
            "pairing of discrete switching models (convert with to_generic first)".into(),
        )),
    }
}

fn positive_pairs(p: &[Vec<Prob>]) -> Vec<(usize, usize)> {
    let n = p.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !p[i][j].is_zero())
        .collect()
}

fn paired_transitions(p: &[Vec<Prob>], pairs: &[(usize, usize)]) -> Vec<Vec<Prob>> {
    pairs
        .iter()
        .map(|&(_, j)| pairs.iter().map(|&(k, l)| &p[j][k] * &p[k][l]).collect())
        .collect()
}

fn named(spec: ModelSpec, original: &ModelSpec) -> ModelSpec {
    match original.name() {
        Some(n) => spec.with_name(format!("{n}_paired")),
        None => spec,
    }
}

fn pair_generic(g: &GenericDiscrete, original: &ModelSpec) -> Result<PairedModel> {
    let (nx, ny) = (g.symbols(), g.states());
    let reach: Vec<Vec<Prob>> = (0..ny)
        .map(|i| {
            (0..ny)
                .map(|j| {
                    let mut any = Prob::zero();
                    for xp in 0..nx {
                        for x in 0..nx {
                            any += g.q(xp, i, x, j);
                        }
                    }
                    any
                })
                .collect()
        })
        .collect();
    let pairs = positive_pairs(&reach);
    let table = GenericDiscrete::from_fn(
        nx * nx,
        pairs.len(),
        |a, s, b, t| {
            let x2 = a % nx;
            let (x3, x4) = (b / nx, b % nx);
            let (_, j) = pairs[s];
            let (k, l) = pairs[t];
            g.q(x2, j, x3, k) * g.q(x3, k, x4, l)
        },
        |a, s| {
            let (x1, x2) = (a / nx, a % nx);
            let (i, j) = pairs[s];
            g.init(x1, i) * g.q(x1, i, x2, j)
        },
    );
    let spec = ModelSpec::new(ModelKind::GenericDiscrete(table))?;
    Ok(PairedModel {
        model: named(spec, original),
        pairs,
        symbols: Some(nx),
    })
}

fn pair_hmm(h: &Hmm, original: &ModelSpec) -> Result<PairedModel> {
    let pairs = positive_pairs(&h.transitions);
    let transitions = paired_transitions(&h.transitions, &pairs);
    let initial_hidden: Vec<Prob> = pairs.iter().map(|&(i, j)| &h.initial_hidden[i] * &h.transitions[i][j]).collect();
    match &h.emissions {
        Emissions::Discrete(f) => {
            let nx = f[0].len();
            let joint = |first: &[Vec<Prob>]| -> Vec<Vec<Prob>> {
                pairs
                    .iter()
                    .map(|&(i, j)| (0..nx * nx).map(|a| &first[i][a / nx] * &f[j][a % nx]).collect())
                    .collect()
            };
            let emissions = joint(f);
            let initial_emissions = h.initial_emissions.as_ref().map(|g| joint(g));
            let spec = ModelSpec::new(ModelKind::Hmm(Hmm {
                transitions,
                emissions: Emissions::Discrete(emissions),
                initial_hidden,
                initial_emissions,
            }))?;
            Ok(PairedModel {
                model: named(spec, original),
                pairs,
                symbols: Some(nx),
            })
        }
        Emissions::Gaussian(g) => {
            let laws = pairs
                .iter()
                .enumerate()
                .map(|(s, &(i, j))| {
                    let mean = stack(g[i].mean(), g[j].mean());
                    let cov = block_diag(g[i].cov(), g[j].cov());
                    Gaussian::new(mean, cov, s)
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = ModelSpec::new(ModelKind::Hmm(Hmm {
                transitions,
                emissions: Emissions::Gaussian(laws),
                initial_hidden,
                initial_emissions: None,
            }))?;
            Ok(PairedModel {
                model: named(spec, original),
                pairs,
                symbols: None,
            })
        }
    }
}

fn stack(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

fn blocks(tl: &DMatrix<f64>, tr: &DMatrix<f64>, bl: &DMatrix<f64>, br: &DMatrix<f64>) -> DMatrix<f64> {
    let d = tl.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(tl);
    out.view_mut((0, d), (d, d)).copy_from(tr);
    out.view_mut((d, 0), (d, d)).copy_from(bl);
    out.view_mut((d, d), (d, d)).copy_from(br);
    out
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn pair_glm(g: &GaussianLinearSwitching, original: &ModelSpec) -> Result<PairedModel> {
    let d = g.dim();
    let pairs = positive_pairs(&g.transitions);
    let transitions = paired_transitions(&g.transitions, &pairs);
    let initial_hidden: Vec<Prob> = pairs.iter().map(|&(i, j)| &g.initial_hidden[i] * &g.transitions[i][j]).collect();
    let zero = DMatrix::<f64>::zeros(d, d);
    let eye = DMatrix::<f64>::identity(d, d);
    let mut f = Vec::with_capacity(pairs.len());
    let mut noise = Vec::with_capacity(pairs.len());
    let mut initial_x = Vec::with_capacity(pairs.len());
    for (s, &(i, j)) in pairs.iter().enumerate() {
        let (fi, fj) = (&g.f[i], &g.f[j]);
        let mut fp = DMatrix::zeros(2 * d, 2 * d);
        fp.view_mut((0, d), (d, d)).copy_from(fi);
        fp.view_mut((d, d), (d, d)).copy_from(&(fj * fi));
        f.push(fp);

        let (mi, mj) = (g.noise[i].mean(), g.noise[j].mean());
        let mean = stack(mi, &(fj * mi + mj));
        let b = blocks(&eye, &zero, fj, &eye);
        let cov = symmetrize(&b * block_diag(g.noise[i].cov(), g.noise[j].cov()) * b.transpose());
        noise.push(Gaussian::new(mean, cov, s)?);

        let (m0, s0) = (g.initial_x[i].mean(), g.initial_x[i].cov());
        let mean = stack(m0, &(fj * m0 + mj));
        let cov = symmetrize(blocks(
            s0,
            &(s0 * fj.transpose()),
            &(fj * s0),
            &(fj * s0 * fj.transpose() + g.noise[j].cov()),
        ));
        initial_x.push(Gaussian::new(mean, cov, s)?);
    }
    let spec = ModelSpec::new(ModelKind::GaussianLinearSwitching(GaussianLinearSwitching {
        transitions,
        f,
        noise,
        initial_hidden,
        initial_x,
    }))?;
    Ok(PairedModel {
        model: named(spec, original),
        pairs,
        symbols: None,
    })
}
