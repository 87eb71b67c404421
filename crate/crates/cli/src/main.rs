fn main() {
    std::process::exit(bayeslin_cli::run_command(std::env::args_os()));
}
