fn main() {
    std::process::exit(thermolimit_cli::run_cli(std::env::args_os()));
}
