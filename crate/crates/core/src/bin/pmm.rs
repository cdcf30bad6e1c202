fn main() {
    std::process::exit(pmm_viterbi::cli::run(std::env::args_os()));
}
