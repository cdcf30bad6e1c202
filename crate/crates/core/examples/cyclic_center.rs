// Find a cyclic center, read the A-condition constants off the block and
// grow the center until the conditions hold and a barrier is certified.

use pmm_viterbi::nodes::{check_a_conditions, derive_a_parameters, find_cyclic_center, AConditionsInput, AParameters};
use pmm_viterbi::prob::parse_prob;
use pmm_viterbi::{canonical, symbols_1based};

pub fn run_example() -> Result<(usize, usize), Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm().exact()?;
    let center = find_cyclic_center(&model, 3, 1, false)?.into_iter().next().ok_or("no center")?;
    let flank = symbols_1based(&[1]);
    // placeholder constants only fix the block layout; the real ones are derived below
    let probe = AParameters {
        epsilon: parse_prob("0")?,
        delta: parse_prob("1")?,
        big_delta: parse_prob("1")?,
        epsilon_sup: 0.0,
        epsilon_needed: 0.0,
    };
    for cycles in 2..=40 {
        let layout = AConditionsInput::cyclic(&center.cycle, cycles, &flank, &flank, &probe, 0)?;
        let Some(params) = derive_a_parameters(&model, &layout.blocks[0], &layout.indices, 0)? else {
            continue;
        };
        let input = AConditionsInput::cyclic(&center.cycle, cycles, &flank, &flank, &params, 0)?;
        let report = check_a_conditions(&model, &input)?;
        if report.pass() {
            assert!(report.certificates.iter().all(|c| c.reverify(&model).unwrap_or(false)));
            return Ok((cycles, report.order));
        }
    }
    Err("A-conditions never hold up to N = 40".into())
}

#[allow(dead_code)]
fn main() {
    let (n, order) = run_example().expect("center");
    println!("A-conditions hold from N = {n}; barrier order {order}");
}
