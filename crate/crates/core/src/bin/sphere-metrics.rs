fn main() {
    std::process::exit(sphere_metrics::cli_main(std::env::args_os()));
}
