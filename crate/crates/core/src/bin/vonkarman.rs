fn main() {
    std::process::exit(vonkarman::cli::dispatch(std::env::args_os()));
}
