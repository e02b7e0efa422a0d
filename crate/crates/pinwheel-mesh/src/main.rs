use clap::Parser;
use pinwheel_mesh::cli;

fn main() {
    let args = cli::Cli::parse();
    std::process::exit(cli::run(args));
}
