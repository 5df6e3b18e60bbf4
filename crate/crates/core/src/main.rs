fn main() {
    std::process::exit(jacobi_mv::cli::main_with_args(std::env::args_os()));
}
