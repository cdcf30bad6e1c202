// Segment maxima compose by max-plus products: splitting a segment at any
// interior point and multiplying the two halves gives the whole.

use pmm_viterbi::{canonical, segment_max, symbols_1based};

pub fn run_example() -> Result<Vec<Vec<f64>>, Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm().exact()?;
    let seg = symbols_1based(&[1, 2, 2, 1, 1, 2]);
    let whole = segment_max(&model, &seg)?;
    for l in 1..seg.len() - 1 {
        let left = segment_max(&model, &seg[..=l])?;
        let right = segment_max(&model, &seg[l..])?;
        assert_eq!(left.mul(&right), whole);
    }
    Ok(whole.ln_rows())
}

#[allow(dead_code)]
fn main() {
    for row in run_example().expect("segment") {
        println!("{row:?}");
    }
}
