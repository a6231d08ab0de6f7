fn main() {
    std::process::exit(flexokit::cli::main_with_args(std::env::args_os()));
}
