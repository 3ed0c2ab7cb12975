fn main() {
    std::process::exit(projtomo_cli::run(std::env::args_os()));
}
