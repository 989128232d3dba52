fn main() {
    std::process::exit(twlab_cli::main_with_args(std::env::args_os()));
}
