fn main() {
    std::process::exit(asreg_cli::run(std::env::args_os()));
}
