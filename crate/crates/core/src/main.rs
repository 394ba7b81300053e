fn main() {
    std::process::exit(hierhop::cli::run(std::env::args_os()));
}
