fn main() {
    std::process::exit(auxcorpus::cli::run(std::env::args_os()));
}
