fn main() {
    std::process::exit(parsimony::cli::run(std::env::args_os()));
}
