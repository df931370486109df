fn main() {
    std::process::exit(latcalc::cli::run_main());
}
