fn main() {
    let mut out = std::io::stdout().lock();
    std::process::exit(kmoments::cli::run(std::env::args_os(), &mut out));
}
