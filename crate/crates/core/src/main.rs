fn main() {
    std::process::exit(ghz_star::cli::run(std::env::args_os()));
}
