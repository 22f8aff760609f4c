use std::path::Path;

use latent_evolve_core::{run_evolution, EvolutionConfig, Rng};

use crate::artifacts::{write_run, EvaluatorDescriptor};
use crate::cli::{load_config, RunArgs};
use crate::error::{CliError, CliResult};
use crate::evaluator::EvaluatorSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub best_distance: f64,
    pub wall_time_secs: f64,
    pub evaluator: EvaluatorDescriptor,
}

/// Runs one evolution with `seed` and writes its artifacts to `out`.
///
/// The config echo records `seed` as `master_seed`.
pub fn execute_run(
    config: &EvolutionConfig,
    seed: u64,
    spec: &EvaluatorSpec,
    out: &Path,
) -> CliResult<RunOutcome> {
    let config = EvolutionConfig {
        master_seed: seed,
        ..config.clone()
    };
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let (mut evaluator, descriptor) = spec.build(&config)?;

    let every = (config.generations / 10).max(1);
    let label = out.display().to_string();
    let outcome = run_evolution(
        &config,
        &mut evaluator,
        &mut Rng::seed_from_u64(seed),
        |s| {
            if s.generation % every == 0 || s.generation == config.generations {
                log::info!(
                    "[{label}] generation {}/{}: best {:.4} mean {:.4} ± {:.4} (best so far {:.4})",
                    s.generation,
                    config.generations,
                    s.best_distance,
                    s.mean_distance,
                    s.std_distance,
                    s.best_so_far
                );
            }
        },
    );
    evaluator.finish();
    let record = outcome.map_err(|aborted| {
        log::error!(
            "run aborted after {} generation record(s)",
            aborted.partial.stats.len()
        );
        CliError::from_evaluation(aborted.source)
    })?;

    write_run(out, &record, seed, &descriptor)?;
    Ok(RunOutcome {
        best_distance: record.hall_of_fame[0].distance,
        wall_time_secs: record.wall_time_secs,
        evaluator: descriptor,
    })
}

pub fn cmd_run(args: &RunArgs) -> CliResult<RunOutcome> {
    let config = load_config(args.config.as_ref())?;
    let spec = args.evaluator.spec()?;
    let seed = args.seed.unwrap_or(config.master_seed);
    let outcome = execute_run(&config, seed, &spec, &args.out)?;
    log::info!(
        "best distance {:.6} in {:.1}s; artifacts in {}",
        outcome.best_distance,
        outcome.wall_time_secs,
        args.out.display()
    );
    Ok(outcome)
}
