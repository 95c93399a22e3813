fn main() {
    std::process::exit(rwmau::cli::run(std::env::args_os()));
}
