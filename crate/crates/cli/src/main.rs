use clap::Parser;
use entbound_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    match entbound_cli::run(cli) {
        Ok(status) => std::process::exit(status.code()),
        Err(e) => {
            eprintln!("entbound: {e}");
            std::process::exit(1);
        }
    }
}
