fn main() {
    std::process::exit(lcfpost::cli::run(std::env::args_os()));
}
