fn main() {
    std::process::exit(ordered_cover::cli::run(std::env::args_os()));
}
