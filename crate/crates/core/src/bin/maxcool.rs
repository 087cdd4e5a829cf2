fn main() {
    std::process::exit(maxcool::harness::cli::run_cli(std::env::args_os()));
}
