fn main() {
    std::process::exit(confmac::cli::run());
}
