fn main() {
    std::process::exit(gwloc::cli::run_command(std::env::args_os()));
}
