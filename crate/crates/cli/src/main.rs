fn main() {
    std::process::exit(freqscan_cli::run(std::env::args_os()));
}
