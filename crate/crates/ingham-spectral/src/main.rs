fn main() {
    std::process::exit(ingham_spectral::cli::main_with_args(std::env::args_os()));
}
