fn main() {
    std::process::exit(secret_teleport::harness::run_cli(std::env::args_os()));
}
