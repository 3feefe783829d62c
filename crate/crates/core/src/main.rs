fn main() {
    std::process::exit(rffso::cli::main());
}
