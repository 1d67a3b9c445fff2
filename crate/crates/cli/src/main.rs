use clap::Parser;
use modeiso_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
