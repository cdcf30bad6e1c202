//! Every example under `examples/` runs to completion.

mod barrier_certificate {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/barrier_certificate.rs"));
}

#[test]
fn barrier_certificate_runs() {
    barrier_certificate::run_example().expect("barrier_certificate");
}

mod brute_force_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/brute_force_oracle.rs"));
}

#[test]
fn brute_force_oracle_runs() {
    brute_force_oracle::run_example().expect("brute_force_oracle");
}

mod condition_checks {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/condition_checks.rs"));
}

#[test]
fn condition_checks_runs() {
    condition_checks::run_example().expect("condition_checks");
}

mod cyclic_center {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cyclic_center.rs"));
}

#[test]
fn cyclic_center_runs() {
    cyclic_center::run_example().expect("cyclic_center");
}

mod experiment_recipes {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/experiment_recipes.rs"));
}

#[test]
fn experiment_recipes_runs() {
    experiment_recipes::run_example().expect("experiment_recipes");
}

mod node_scan {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/node_scan.rs"));
}

#[test]
fn node_scan_runs() {
    node_scan::run_example().expect("node_scan");
}

mod offline_decode {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/offline_decode.rs"));
}

#[test]
fn offline_decode_runs() {
    offline_decode::run_example().expect("offline_decode");
}

mod online_decoding {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/online_decoding.rs"));
}

#[test]
fn online_decoding_runs() {
    online_decoding::run_example().expect("online_decoding");
}

mod pair_grouping {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pair_grouping.rs"));
}

#[test]
fn pair_grouping_runs() {
    pair_grouping::run_example().expect("pair_grouping");
}

mod segment_max_plus {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/segment_max_plus.rs"));
}

#[test]
fn segment_max_plus_runs() {
    segment_max_plus::run_example().expect("segment_max_plus");
}

mod simulate_trajectory {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/simulate_trajectory.rs"));
}

#[test]
fn simulate_trajectory_runs() {
    simulate_trajectory::run_example().expect("simulate_trajectory");
}

mod tie_pathology {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tie_pathology.rs"));
}

#[test]
fn tie_pathology_runs() {
    tie_pathology::run_example().expect("tie_pathology");
}
