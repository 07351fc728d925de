fn main() {
    std::process::exit(flindep::cli::run(std::env::args_os()));
}
