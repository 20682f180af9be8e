fn main() {
    std::process::exit(fqlab::cli::run_cli(std::env::args_os()));
}
