fn main() {
    std::process::exit(kppfront::cli::run(std::env::args_os()));
}
