fn main() {
    let code = turing_unilateral::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
