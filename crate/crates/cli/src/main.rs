fn main() {
    std::process::exit(mim_cli::run(std::env::args_os()));
}
