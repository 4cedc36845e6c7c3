fn main() {
    std::process::exit(betahand::cli::run(std::env::args_os()));
}
