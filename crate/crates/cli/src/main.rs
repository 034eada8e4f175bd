fn main() {
    std::process::exit(landair_cli::run(std::env::args()))
}
