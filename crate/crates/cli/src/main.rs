fn main() {
    std::process::exit(stopwait_cli::run(std::env::args_os()));
}
