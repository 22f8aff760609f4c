use std::process::Command;
use std::time::Duration;

use latent_evolve_core::bridge::WorkerProcess;
use latent_evolve_core::evaluators::Evaluation;
use latent_evolve_core::{
    BatchEvaluator, Embedding, EvolutionConfig, LatentVector, SyntheticWorld, TargetEvaluator,
};

use crate::artifacts::EvaluatorDescriptor;
use crate::error::{CliError, CliResult};

/// How to obtain an evaluator for a run.
#[derive(Clone, Debug)]
pub enum EvaluatorSpec {
    Synthetic {
        world_seed: u64,
        proxy_dim: Option<usize>,
    },
    Worker {
        command: String,
        target: String,
        grace: Duration,
    },
}

pub enum RunEvaluator {
    Synthetic(TargetEvaluator<SyntheticWorld>),
    Worker(TargetEvaluator<WorkerProcess>),
}

impl EvaluatorSpec {
    pub fn build(
        &self,
        config: &EvolutionConfig,
    ) -> CliResult<(RunEvaluator, EvaluatorDescriptor)> {
        match self {
            EvaluatorSpec::Synthetic {
                world_seed,
                proxy_dim,
            } => {
                let proxy_dim = proxy_dim
                    .unwrap_or_else(|| SyntheticWorld::default_proxy_dim(config.latent_dim));
                let world = SyntheticWorld::new(
                    *world_seed,
                    config.latent_dim,
                    proxy_dim,
                    config.embedding_dim,
                )
                .map_err(|e| CliError::Config(e.to_string()))?;
                Ok((
                    RunEvaluator::Synthetic(world.evaluator()),
                    EvaluatorDescriptor::Synthetic {
                        world_seed: *world_seed,
                        proxy_dim,
                    },
                ))
            }
            EvaluatorSpec::Worker {
                command,
                target,
                grace,
            } => {
                let argv = shlex::split(command)
                    .filter(|a| !a.is_empty())
                    .ok_or_else(|| {
                        CliError::Config(format!("cannot parse --worker-cmd {command:?}"))
                    })?;
                let mut cmd = Command::new(&argv[0]);
                cmd.args(&argv[1..]);
                let mut worker =
                    WorkerProcess::spawn(cmd, config.latent_dim, config.embedding_dim, *grace)?;
                let embedding = worker
                    .set_target(target)
                    .map_err(CliError::from_evaluation)?;
                let evaluator = TargetEvaluator::with_target(worker, embedding)
                    .map_err(CliError::from_evaluation)?;
                Ok((
                    RunEvaluator::Worker(evaluator),
                    EvaluatorDescriptor::Worker {
                        command: command.clone(),
                        target: target.clone(),
                    },
                ))
            }
        }
    }
}

impl RunEvaluator {
    /// Releases external resources; shuts a worker down.
    pub fn finish(self) {
        if let RunEvaluator::Worker(ev) = self {
            ev.into_model().shutdown();
        }
    }
}

impl BatchEvaluator for RunEvaluator {
    fn latent_dim(&self) -> usize {
        match self {
            RunEvaluator::Synthetic(e) => e.latent_dim(),
            RunEvaluator::Worker(e) => e.latent_dim(),
        }
    }

    fn embedding_dim(&self) -> usize {
        match self {
            RunEvaluator::Synthetic(e) => e.embedding_dim(),
            RunEvaluator::Worker(e) => e.embedding_dim(),
        }
    }

    fn target(&self) -> Option<&Embedding> {
        match self {
            RunEvaluator::Synthetic(e) => e.target(),
            RunEvaluator::Worker(e) => e.target(),
        }
    }

    fn evaluate_batch(
        &mut self,
        batch: &[LatentVector],
    ) -> latent_evolve_core::Result<Vec<Evaluation>> {
        match self {
            RunEvaluator::Synthetic(e) => e.evaluate_batch(batch),
            RunEvaluator::Worker(e) => e.evaluate_batch(batch),
        }
    }
}
