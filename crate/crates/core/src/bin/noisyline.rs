fn main() {
    std::process::exit(noisyline::harness::cli::run_cli(std::env::args_os().collect()));
}
