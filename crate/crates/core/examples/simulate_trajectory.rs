// Load a shipped model, sample a seeded trajectory and write it as CSV.

use pmm_viterbi::io::write_trajectory_csv;
use pmm_viterbi::{canonical, simulate, Scorer, Seed};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm();
    let traj = simulate(&model, 8, Seed(42))?;
    let mut csv = Vec::new();
    write_trajectory_csv(&traj, model.observation_space(), &mut csv)?;
    let text = String::from_utf8(csv)?;
    // same seed, same bytes
    let again = simulate(&model, 8, Seed(42))?;
    assert_eq!(traj, again);
    Ok(text)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("simulation"));
}
