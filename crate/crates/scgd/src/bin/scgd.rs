fn main() {
    std::process::exit(scgd::cli::run(std::env::args_os()));
}
