fn main() {
    std::process::exit(schwarzian::cli::run());
}
