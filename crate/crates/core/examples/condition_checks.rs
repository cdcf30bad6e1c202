// Run the sufficient-condition checkers on the shipped models and report the
// first failing item of each.

use pmm_viterbi::canonical;
use pmm_viterbi::conditions::{check_discrete_corollary, check_glm_corollary, check_hmm_corollary};

pub fn run_example() -> Result<Vec<(String, bool, Option<String>)>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    let hmm = check_hmm_corollary(&canonical::example_1_1_hmm())?;
    out.push(("example_1_1_hmm / hmm".into(), hmm.overall, hmm.first_failure().map(|i| i.name.clone())));
    let disc = check_discrete_corollary(&canonical::two_state_pmm(), 3)?;
    out.push(("two_state_pmm / discrete".into(), disc.overall, disc.first_failure().map(|i| i.name.clone())));
    let glm = check_glm_corollary(&canonical::glm_scalar())?;
    out.push(("glm_scalar / glm".into(), glm.overall, glm.first_failure().map(|i| i.name.clone())));
    assert!(!hmm.overall && disc.overall && glm.overall);
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    for (what, pass, first) in run_example().expect("checks") {
        println!("{what}: {} {}", if pass { "pass" } else { "fail" }, first.unwrap_or_default());
    }
}
