use clap::Parser;

fn main() {
    let cli = byzfit_cli::args::Cli::parse();
    std::process::exit(byzfit_cli::run(cli));
}
