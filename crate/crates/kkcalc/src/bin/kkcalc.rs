fn main() {
    std::process::exit(kkcalc::cli::run(std::env::args().collect()));
}
