fn main() {
    std::process::exit(decoynet_cli::run(std::env::args_os()));
}
