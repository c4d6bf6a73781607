fn main() {
    std::process::exit(pansharp::cli::run(std::env::args_os()));
}
