fn main() {
    std::process::exit(qbroadcast::cli::main());
}
