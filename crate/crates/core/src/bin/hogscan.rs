fn main() {
    std::process::exit(hogscan::cli::run(std::env::args_os()));
}
