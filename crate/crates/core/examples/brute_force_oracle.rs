// Cross-check the dynamic program against exhaustive enumeration.

use pmm_viterbi::{brute_force_oracle, canonical, decode, symbols_1based, DecodeOptions, Pins, Weight};

pub fn run_example() -> Result<f64, Box<dyn std::error::Error>> {
    let model = canonical::tiebreak_4state().exact()?;
    let obs = symbols_1based(&[1, 3, 2, 1, 3, 1]);
    let dp = decode(&model, &obs, &Pins::new(), &DecodeOptions::default())?;
    let oracle = brute_force_oracle(&model, &obs, None, None, true)?;
    assert_eq!(dp.score, oracle.score);
    Ok(dp.score.ln())
}

#[allow(dead_code)]
fn main() {
    println!("max log-likelihood {}", run_example().expect("oracle"));
}
