fn main() {
    std::process::exit(ncrindler::cli::run_from(std::env::args_os()));
}
