fn main() {
    std::process::exit(kpu_cli::run(std::env::args_os()));
}
