// Two adjacent nodes that both break ties towards the same state produce a
// path of likelihood zero. Mixed choices are fine.

use pmm_viterbi::{canonical, decode, symbols_1based, DecodeOptions, Pins};

pub fn run_example() -> Result<Vec<((usize, usize), f64)>, Box<dyn std::error::Error>> {
    let model = canonical::tiebreak_4state().exact()?;
    let obs = symbols_1based(&[1, 1, 2, 1, 1, 1, 1]);
    let mut out = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let d = decode(&model, &obs, &Pins::new().with(1, a).with(3, b), &DecodeOptions::default())?;
            assert_eq!(d.is_zero(), a == b);
            out.push(((a + 1, b + 1), d.log_likelihood()));
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    for ((a, b), ll) in run_example().expect("pathology") {
        println!("y_2 = {a}, y_4 = {b}: log-likelihood {ll}");
    }
}
