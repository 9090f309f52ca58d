fn main() {
    std::process::exit(fracgelfand::cli::run(std::env::args_os()));
}
