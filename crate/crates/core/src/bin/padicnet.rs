fn main() {
    std::process::exit(padicnet::cli::main_with_args(std::env::args_os()));
}
