fn main() {
    std::process::exit(tourney_cli::main_with_args(std::env::args_os()));
}
