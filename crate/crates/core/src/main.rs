fn main() {
    std::process::exit(pimcrypt::cli::run(std::env::args_os()));
}
