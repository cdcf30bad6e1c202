// Run a named experiment recipe and print its CSV.

use pmm_viterbi::experiments::{run_experiment, ExperimentRecipe};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let recipe = ExperimentRecipe::new("no-nodes", 11)?.with_steps(2_000);
    let out = run_experiment(&recipe)?;
    let mut csv = Vec::new();
    out.write_csv(&mut csv)?;
    Ok(String::from_utf8(csv)?)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("experiment"));
}
