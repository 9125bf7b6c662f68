fn main() {
    std::process::exit(rfwpt_cli::run(std::env::args_os()));
}
