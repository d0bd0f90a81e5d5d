fn main() {
    std::process::exit(setquad::cli::main_with(std::env::args_os()));
}
