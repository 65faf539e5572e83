fn main() {
    std::process::exit(dhilbert::cli::run(std::env::args_os()));
}
