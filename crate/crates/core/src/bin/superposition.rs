fn main() {
    std::process::exit(superposition::cli::run(std::env::args_os()));
}
