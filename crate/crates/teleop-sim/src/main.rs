fn main() {
    std::process::exit(teleop_sim::cli::main());
}
