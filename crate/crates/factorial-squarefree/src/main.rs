fn main() {
    std::process::exit(factorial_squarefree::cli::run(std::env::args_os()));
}
