use clap::Parser;
use lfharm_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    std::process::exit(lfharm_cli::execute(&cli));
}
