fn main() {
    std::process::exit(veltman::cli::run(std::env::args_os()));
}
