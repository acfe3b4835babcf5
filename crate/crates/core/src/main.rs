fn main() {
    std::process::exit(tropabel::cli::main());
}
