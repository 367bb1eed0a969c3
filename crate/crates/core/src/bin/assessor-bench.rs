fn main() {
    std::process::exit(assessor_bench::cli::run(std::env::args_os()));
}
