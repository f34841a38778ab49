use clap::Parser;

use qualc::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let echo = std::env::args().collect::<Vec<_>>().join(" ");
    let report = run(&cli, &echo, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(report.exit_code());
}
