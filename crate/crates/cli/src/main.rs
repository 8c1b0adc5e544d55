use clap::Parser;

fn main() {
    let cli = magspec_cli::Cli::parse();
    std::process::exit(magspec_cli::run_cli(&cli));
}
