fn main() {
    std::process::exit(modrep::cli::run_from_env());
}
