fn main() {
    std::process::exit(cavres_cli::run(std::env::args_os()));
}
