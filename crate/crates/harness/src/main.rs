use clap::Parser;
use codazzi_harness::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
