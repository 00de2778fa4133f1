fn main() {
    std::process::exit(spraycard_cli::run(std::env::args_os()));
}
