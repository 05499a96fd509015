fn main() {
    std::process::exit(uqslmn::cli::main_with_args(std::env::args_os()));
}
