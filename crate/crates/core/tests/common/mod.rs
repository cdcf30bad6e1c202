#![allow(dead_code)]

use num::BigRational;

use pmm_viterbi::model::GenericDiscrete;
use pmm_viterbi::simulate::CounterRng;
use pmm_viterbi::{canonical, simulate, symbols_1based, ModelKind, ModelSpec, Observation, Scorer, Seed};

/// Random kernel with small integer weights, so zeros and exact ties are common.
pub fn random_generic(rng: &CounterRng, step: u64, max_symbols: u64, max_states: u64) -> ModelSpec {
    let nx = 1 + rng.below(step, 0, max_symbols) as usize;
    let ny = 1 + rng.below(step, 1, max_states) as usize;
    let weight = |coord: u64| rng.below(step, coord, 4) as i64;
    let cells = nx * ny;
    let rows: Vec<Vec<i64>> = (0..=cells)
        .map(|row| {
            let mut w: Vec<i64> = (0..cells).map(|c| weight(10 + (row * cells + c) as u64)).collect();
            if w.iter().all(|&v| v == 0) {
                w[rng.below(step, 5, cells as u64) as usize] = 1;
            }
            w
        })
        .collect();
    let ratio = |row: &[i64], c: usize| BigRational::new(row[c].into(), row.iter().sum::<i64>().into());
    let g = GenericDiscrete::from_fn(
        nx,
        ny,
        |xp, yp, x, y| ratio(&rows[xp * ny + yp], x * ny + y),
        |x, y| ratio(&rows[cells], x * ny + y),
    );
    ModelSpec::new(ModelKind::GenericDiscrete(g)).expect("random kernel rows sum to one")
}

pub fn random_symbols(rng: &CounterRng, step: u64, n: usize, symbols: usize) -> Vec<Observation> {
    (0..n)
        .map(|k| Observation::Symbol(rng.below(step, 1000 + k as u64, symbols as u64) as usize))
        .collect()
}

pub fn symbol_count<S: Scorer + ?Sized>(model: &S) -> usize {
    match model.observation_space() {
        pmm_viterbi::ObservationSpace::Discrete { symbols } => symbols,
        _ => panic!("discrete model expected"),
    }
}

/// Shipped discrete models on simulated data, the pathology word, and random
/// kernels on uniform strings.
pub fn discrete_corpus() -> Vec<(String, ModelSpec, Vec<Observation>)> {
    let shipped = [
        ("example_1_1", canonical::example_1_1()),
        ("example_1_1_hmm", canonical::example_1_1_hmm()),
        ("example_1_2", canonical::example_1_2()),
        ("tiebreak_4state", canonical::tiebreak_4state()),
        ("two_state_pmm", canonical::two_state_pmm()),
    ];
    let mut out = Vec::new();
    for (name, model) in shipped {
        for seed in 1..=4 {
            let traj = simulate(&model, 30, Seed(seed)).expect("simulate");
            out.push((format!("{name}/seed{seed}"), model.clone(), traj.observations));
        }
    }
    out.push((
        "tiebreak_4state/word".into(),
        canonical::tiebreak_4state(),
        symbols_1based(&[1, 1, 2, 1, 1, 1, 1]),
    ));
    let rng = CounterRng::new(Seed(77));
    for k in 0..40 {
        let model = random_generic(&rng, k, 3, 4);
        let obs = random_symbols(&rng, k, 14, symbol_count(&model));
        out.push((format!("random/{k}"), model, obs));
    }
    out
}
