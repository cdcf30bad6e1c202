// Certify a block as a barrier, then try to break the certificate by embedding
// the block in random sequences.

use pmm_viterbi::nodes::{falsify_barrier, find_prop21_split, FalsifyTarget};
use pmm_viterbi::{canonical, symbols_1based, Seed};

pub fn run_example() -> Result<usize, Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm().exact()?;
    let block = symbols_1based(&[1; 19]);
    let cert = find_prop21_split(&model, &block, 0)?.ok_or("no split certifies")?;
    assert!(cert.reverify(&model)?);
    let target = FalsifyTarget {
        state: Some(cert.target),
        strong: cert.strict,
        max_flank: 8,
    };
    let outcome = falsify_barrier(&canonical::two_state_pmm(), &block, cert.order, target, 200, Seed(7))?;
    assert!(outcome.is_none_found());
    Ok(cert.order)
}

#[allow(dead_code)]
fn main() {
    println!("barrier of order {}", run_example().expect("certificate"));
}
