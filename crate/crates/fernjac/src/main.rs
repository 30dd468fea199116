fn main() {
    std::process::exit(fernjac::cli::run(std::env::args_os()));
}
