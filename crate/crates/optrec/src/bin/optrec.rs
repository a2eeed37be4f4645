fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(optrec::cli::run(&args));
}
