fn main() {
    std::process::exit(mvgb_cli::cli::run(std::env::args_os()));
}
