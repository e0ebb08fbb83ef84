fn main() {
    std::process::exit(geonet::io::cli::run(std::env::args_os()));
}
