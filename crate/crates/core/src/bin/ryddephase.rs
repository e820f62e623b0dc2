fn main() {
    std::process::exit(ryddephase::cli::main_with_args(std::env::args_os()));
}
