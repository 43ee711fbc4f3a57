fn main() {
    std::process::exit(lmgfs_cli::run(std::env::args_os()));
}
