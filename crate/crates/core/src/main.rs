fn main() {
    std::process::exit(clickbound::cli::run(std::env::args_os()));
}
