fn main() {
    std::process::exit(econvex::cli::main_with_args(std::env::args_os()));
}
