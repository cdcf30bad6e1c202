// Offline Viterbi decoding in float and exact arithmetic.
//
// The six-state model keeps its first state on the side of the majority
// symbol in `x_{2:n}`, so the decoded first state is predictable by counting.

use pmm_viterbi::{canonical, symbols_1based, viterbi_path, TieRule, Weight};

pub fn run_example() -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let model = canonical::example_1_1();
    let obs = symbols_1based(&[1, 1, 1, 2, 1]);
    let float = viterbi_path(&model, &obs, &TieRule::Lexicographic)?;
    let exact = viterbi_path(&model.exact()?, &obs, &TieRule::Lexicographic)?;
    assert_eq!(float.path, exact.path);
    assert!((float.log_likelihood() - exact.score.ln()).abs() < 1e-12);

    let obs = symbols_1based(&[1, 2, 2, 2, 1]);
    let other = viterbi_path(&model, &obs, &TieRule::Lexicographic)?;
    assert_eq!(other.path, vec![1; 5]);
    Ok(float.path.iter().map(|y| y + 1).collect())
}

#[allow(dead_code)]
fn main() {
    println!("{:?}", run_example().expect("decode"));
}
