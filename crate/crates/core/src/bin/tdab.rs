fn main() {
    std::process::exit(tdab::cli::dispatch(std::env::args_os()));
}
