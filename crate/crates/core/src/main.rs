fn main() {
    std::process::exit(lanestyle::cli::run(std::env::args_os()));
}
