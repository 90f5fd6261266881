use clap::Parser;
use crib_transfer::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
