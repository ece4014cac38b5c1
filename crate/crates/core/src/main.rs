fn main() {
    std::process::exit(wavelink::cli::run(std::env::args_os()));
}
