fn main() {
    std::process::exit(fliess_kit::run(std::env::args_os()));
}
