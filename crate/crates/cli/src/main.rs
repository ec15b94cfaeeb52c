fn main() {
    std::process::exit(locext_cli::run(std::env::args_os()));
}
