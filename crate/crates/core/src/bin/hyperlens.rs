fn main() {
    std::process::exit(hyperlens::cli::run(std::env::args_os()));
}
