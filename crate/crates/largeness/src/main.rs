fn main() {
    std::process::exit(largeness::run(std::env::args_os().collect()));
}
