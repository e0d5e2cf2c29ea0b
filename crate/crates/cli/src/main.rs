fn main() {
    std::process::exit(ensreach_cli::run(std::env::args_os()));
}
