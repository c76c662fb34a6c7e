fn main() {
    std::process::exit(distmetric::cli::main());
}
