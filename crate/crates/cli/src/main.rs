fn main() {
    std::process::exit(lfgeo_cli::run(std::env::args()));
}
