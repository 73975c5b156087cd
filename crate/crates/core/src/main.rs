fn main() {
    std::process::exit(commest::cli::main_with_args(std::env::args_os()));
}
