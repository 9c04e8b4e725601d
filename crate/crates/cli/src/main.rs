use clap::Parser;

fn main() {
    let cli = trimer_cli::Cli::parse();
    std::process::exit(trimer_cli::execute(cli));
}
