fn main() {
    std::process::exit(qbilinear::cli::main_with(std::env::args_os()));
}
