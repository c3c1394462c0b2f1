fn main() {
    std::process::exit(nonneg_cocycle::cli::main_with_args(std::env::args_os()));
}
