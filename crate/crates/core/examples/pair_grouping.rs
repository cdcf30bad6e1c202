// Group a chain in consecutive pairs and decode the paired model.

use pmm_viterbi::model::{pair_model, pair_observations};
use pmm_viterbi::{canonical, symbols_1based, viterbi_path, Scorer, TieRule};

pub fn run_example() -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm();
    let paired = pair_model(&model)?;
    let obs = symbols_1based(&[2, 1, 1, 1, 2, 2]);
    let grouped = pair_observations(&obs, paired.symbols)?;
    let dec = viterbi_path(&paired.model, &grouped, &TieRule::Lexicographic)?;
    let direct = viterbi_path(&model, &obs, &TieRule::Lexicographic)?;
    assert!((dec.log_likelihood() - direct.log_likelihood()).abs() < 1e-9);
    assert_eq!(paired.model.num_states(), paired.pairs.len());
    Ok(paired.unpair_path(&dec.path).into_iter().map(|y| y + 1).collect())
}

#[allow(dead_code)]
fn main() {
    println!("{:?}", run_example().expect("pairing"));
}
