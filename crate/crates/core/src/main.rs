fn main() {
    std::process::exit(griglab::cli::main());
}
