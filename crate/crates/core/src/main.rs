fn main() {
    std::process::exit(primes_lab::cli::run_cli(std::env::args_os()));
}
