fn main() {
    std::process::exit(dyndist_cli::main_with(std::env::args_os()));
}
