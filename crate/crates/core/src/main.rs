fn main() {
    std::process::exit(crda::cli::main_with(std::env::args_os()));
}
