fn main() {
    std::process::exit(cmc::cli::run(std::env::args_os()));
}
