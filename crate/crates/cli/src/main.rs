fn main() {
    std::process::exit(metasoc_cli::run(std::env::args_os()));
}
