fn main() {
    std::process::exit(automode::cli::dispatch(std::env::args_os()));
}
