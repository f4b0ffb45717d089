use clap::Parser;
use matchbox_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("matchbox: {e}");
        std::process::exit(e.exit_code());
    }
}
