fn main() {
    std::process::exit(xxz_workbench::cli::main_from_env());
}
