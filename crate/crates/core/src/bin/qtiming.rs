fn main() {
    std::process::exit(qtiming::cli::main_with_args(std::env::args_os()));
}
