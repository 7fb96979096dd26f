fn main() {
    std::process::exit(stepwave_cli::run(std::env::args_os()));
}
