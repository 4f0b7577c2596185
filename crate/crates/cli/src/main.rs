fn main() {
    // Placeholder while the engine comes up; replaced by the real CLI.
    eprintln!("stablecm: not yet wired");
    std::process::exit(1);
}
