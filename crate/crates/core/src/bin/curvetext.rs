use clap::Parser;

fn main() {
    std::process::exit(curvetext::cli::run(curvetext::cli::Cli::parse()));
}
