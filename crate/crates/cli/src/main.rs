use clap::Parser;
use femform_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    if let Err(e) = execute(&cli, &mut out) {
        eprintln!("fem: {e}");
        std::process::exit(e.exit_code());
    }
}
