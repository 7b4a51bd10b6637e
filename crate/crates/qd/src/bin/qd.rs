fn main() {
    std::process::exit(qd::cli::run(std::env::args_os().collect()));
}
