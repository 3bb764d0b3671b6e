fn main() {
    std::process::exit(ctdi::cli::run(std::env::args_os()));
}
