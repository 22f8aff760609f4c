use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorParams;

/// Search hyperparameters and seed for one evolutionary run.
///
/// Serialized as a flat JSON object whose keys are exactly the field names.
/// Unknown keys are rejected. Omitted keys take the defaults: population
/// 200, 500 generations, p_R = 0.75, p_M = 0.001, α = 0.2, tournament of 3,
/// σ = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub latent_dim: usize,
    pub embedding_dim: usize,
    pub population_size: usize,
    pub generations: usize,
    /// Probability that a consecutive parent pair undergoes BLX-α.
    pub crossover_prob: f64,
    /// Probability that an offspring is mutated at all.
    pub mutation_prob: f64,
    /// Probability that each gene of a mutated offspring receives noise.
    pub per_gene_mutation_rate: f64,
    pub blx_alpha: f64,
    pub tournament_size: usize,
    pub mutation_sigma: f64,
    pub hall_of_fame_size: usize,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            latent_dim: 512,
            embedding_dim: 128,
            population_size: 200,
            generations: 500,
            crossover_prob: 0.75,
            mutation_prob: 0.001,
            per_gene_mutation_rate: 0.05,
            blx_alpha: 0.2,
            tournament_size: 3,
            mutation_sigma: 1.0,
            hall_of_fame_size: 10,
            master_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, value) in [
            ("latent_dim", self.latent_dim),
            ("embedding_dim", self.embedding_dim),
            ("population_size", self.population_size),
            ("tournament_size", self.tournament_size),
            ("hall_of_fame_size", self.hall_of_fame_size),
        ] {
            if value == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("per_gene_mutation_rate", self.per_gene_mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.tournament_size > self.population_size {
            return fail(format!(
                "tournament_size ({}) exceeds population_size ({})",
                self.tournament_size, self.population_size
            ));
        }
        if !self.blx_alpha.is_finite() || self.blx_alpha < 0.0 {
            return fail(format!(
                "blx_alpha must be non-negative, got {}",
                self.blx_alpha
            ));
        }
        if !self.mutation_sigma.is_finite() || self.mutation_sigma <= 0.0 {
            return fail(format!(
                "mutation_sigma must be positive, got {}",
                self.mutation_sigma
            ));
        }
        Ok(())
    }

    pub fn operator_params(&self) -> OperatorParams {
        OperatorParams {
            blx_alpha: self.blx_alpha,
            tournament_size: self.tournament_size,
            mutation_sigma: self.mutation_sigma,
            per_gene_mutation_rate: self.per_gene_mutation_rate,
        }
    }

    /// True when both configs describe the same search, ignoring the seed.
    pub fn same_search(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.master_seed = other.master_seed;
        &a == other
    }
}
