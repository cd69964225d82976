fn main() {
    std::process::exit(percolab::cli::dispatch(std::env::args_os()));
}
