fn main() {
    std::process::exit(kadapt::cli::main_entry());
}
