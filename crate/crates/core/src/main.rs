fn main() {
    std::process::exit(rinktrack::cli::main_with_args(std::env::args_os()));
}
