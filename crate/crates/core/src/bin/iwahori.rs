fn main() {
    std::process::exit(iwahori::cli::main_with_args(std::env::args_os()));
}
