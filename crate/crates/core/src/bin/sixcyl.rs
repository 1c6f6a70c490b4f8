fn main() {
    std::process::exit(sixcyl::cli::run(std::env::args_os()));
}
