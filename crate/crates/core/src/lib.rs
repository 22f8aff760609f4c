//! Evolutionary search over the latent space of a generative model.
//!
//! Given a target embedding, the engine evolves latent vectors so that the
//! generator's output, once embedded by a recognition model, lands as close
//! as possible to the target. Fitness is the negated Euclidean distance
//! between embeddings.
//!
//! The crate is organised as:
//!
//! * [`types`], [`rng`], [`config`]: shared domain types, seeding and configuration.
//! * [`operators`]: normal initialization, tournament selection, BLX-α
//!   crossover and Gaussian mutation.
//! * [`engine`]: the generational loop with batch evaluation and a hall of fame.
//! * [`evaluators`]: the batch fitness contract and a synthetic world with a
//!   planted optimum.
//! * [`bridge`]: length-prefixed JSON protocol to an external model worker.
//! * [`metrics`]: distance summaries, diversity matrices, deception Δ and
//!   convergence curves.

pub mod bridge;
pub mod config;
pub mod engine;
pub mod error;
pub mod evaluators;
pub mod metrics;
pub mod operators;
pub mod rng;
pub mod types;

pub use config::EvolutionConfig;
pub use engine::{best_so_far, run_evolution, GenerationStats, HallOfFameEntry, RunRecord};
pub use error::{Error, Result};
pub use evaluators::{BatchEvaluator, EmbeddingModel, Evaluation, SyntheticWorld, TargetEvaluator};
pub use rng::{derive_child_seed, Rng};
pub use types::{euclidean_distance, Embedding, Individual, LatentVector};
