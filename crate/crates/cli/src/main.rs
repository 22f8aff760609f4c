use clap::Parser;
use latent_evolve_cli::cli::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let default_level = match cli.command {
        Command::MockWorker(_) => "warn",
        _ => "info",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .init();
    if let Err(e) = latent_evolve_cli::dispatch(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
