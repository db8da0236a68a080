fn main() {
    std::process::exit(narm::cli::run(std::env::args_os()));
}
