fn main() {
    std::process::exit(maxent_layout::cli::run_main());
}
