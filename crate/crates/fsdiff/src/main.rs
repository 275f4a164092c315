fn main() {
    std::process::exit(fsdiff::cli::main_with_args(std::env::args_os()));
}
