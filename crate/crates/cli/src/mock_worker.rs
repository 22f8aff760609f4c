use std::io::{self, BufReader, BufWriter};
use std::time::Duration;

use latent_evolve_core::bridge::mock::serve_synthetic;
use latent_evolve_core::SyntheticWorld;

use crate::cli::MockWorkerArgs;
use crate::error::{CliError, CliResult};

/// Serves a synthetic world over stdin/stdout until shutdown or EOF.
pub fn cmd_mock_worker(args: &MockWorkerArgs) -> CliResult<()> {
    let proxy_dim = args
        .proxy_dim
        .unwrap_or_else(|| SyntheticWorld::default_proxy_dim(args.latent_dim));
    let world = SyntheticWorld::new(
        args.world_seed,
        args.latent_dim,
        proxy_dim,
        args.embedding_dim,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let stdin = BufReader::new(io::stdin().lock());
    let stdout = BufWriter::new(io::stdout().lock());
    let shut_down = serve_synthetic(stdin, stdout, &world)?;
    if shut_down && args.hang_on_shutdown {
        eprintln!("mock worker: ignoring shutdown");
        loop {
            std::thread::sleep(Duration::from_secs(3600));
        }
    }
    Ok(())
}
