// Scan a sequence for nodes of every order up to a bound.

use pmm_viterbi::nodes::{detect_node, scan_nodes};
use pmm_viterbi::{canonical, symbols_1based};

pub fn run_example() -> Result<Vec<(usize, usize, Vec<usize>)>, Box<dyn std::error::Error>> {
    let model = canonical::tiebreak_4state().exact()?;
    let obs = symbols_1based(&[1, 1, 2, 1, 1, 1, 1]);
    let found: Vec<_> = scan_nodes(&model, &obs, 3)?
        .into_iter()
        .filter(|r| r.is_node())
        .map(|r| (r.time + 1, r.order, r.node_states.iter().map(|y| y + 1).collect()))
        .collect();
    // both inner positions of the word are nodes for states 1 and 2, none strong
    let second = detect_node(&model, &obs[..5], 1)?;
    assert_eq!(second.node_states, vec![0, 1]);
    assert!(!second.is_strong());
    Ok(found)
}

#[allow(dead_code)]
fn main() {
    for (t, r, states) in run_example().expect("scan") {
        println!("t = {t}, order {r}: states {states:?}");
    }
}
