fn main() {
    std::process::exit(orlicz_ig::cli::run());
}
