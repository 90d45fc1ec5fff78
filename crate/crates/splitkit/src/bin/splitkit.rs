fn main() {
    std::process::exit(splitkit::cli::run(std::env::args_os()));
}
