fn main() {
    std::process::exit(dressed_emission::cli::run(std::env::args_os()));
}
