fn main() {
    std::process::exit(normcell_cli::main_with_args(std::env::args_os()));
}
