fn main() {
    std::process::exit(rcf_cli::run(std::env::args_os()));
}
