//! Generational evolutionary loop.
//!
//! Each generation: tournament selection of `population_size` parents,
//! BLX-α on consecutive pairs with probability `crossover_prob`, a
//! per-individual mutation gate with probability `mutation_prob`, one batch
//! evaluation of every individual whose genotype changed, and wholesale
//! replacement of the population by the offspring. The best individuals
//! ever evaluated are kept in an external hall of fame; nothing is
//! reinjected into the population.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EvolutionConfig;
use crate::error::{Error, Result};
use crate::evaluators::{BatchEvaluator, Evaluation};
use crate::operators::{blx_crossover, gaussian_mutate, init_individual, tournament_indices};
use crate::rng::Rng;
use crate::types::{Embedding, Individual, LatentVector};

/// Population statistics for one generation (generation 0 is the initial
/// population).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best distance in the current population.
    pub best_distance: f64,
    pub mean_distance: f64,
    /// Population standard deviation (n denominator) of current distances.
    pub std_distance: f64,
    /// Best distance over every individual evaluated so far in the run.
    pub best_so_far: f64,
    pub evaluations_so_far: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallOfFameEntry {
    pub distance: f64,
    pub latent: LatentVector,
    pub embedding: Embedding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: EvolutionConfig,
    pub stats: Vec<GenerationStats>,
    /// Sorted ascending by distance, without duplicate genotypes.
    pub hall_of_fame: Vec<HallOfFameEntry>,
    pub evaluations: usize,
    pub batch_calls: usize,
    pub wall_time_secs: f64,
}

impl RunRecord {
    fn empty(config: &EvolutionConfig) -> Self {
        Self {
            config: config.clone(),
            stats: Vec::new(),
            hall_of_fame: Vec::new(),
            evaluations: 0,
            batch_calls: 0,
            wall_time_secs: 0.0,
        }
    }

    /// Records equal in everything but wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.config == other.config
            && self.stats == other.stats
            && self.hall_of_fame == other.hall_of_fame
            && self.evaluations == other.evaluations
            && self.batch_calls == other.batch_calls
    }
}

/// A run stopped early because the evaluator failed.
#[derive(Debug, Error)]
#[error("run aborted after {} completed generation(s): {source}", .partial.stats.len())]
pub struct RunAborted {
    #[source]
    pub source: Error,
    /// Everything recorded before the failure.
    pub partial: Box<RunRecord>,
}

/// Returns the best individual of the run and its distance.
pub fn best_so_far(record: &RunRecord) -> Result<(&LatentVector, f64)> {
    record
        .hall_of_fame
        .first()
        .map(|e| (&e.latent, e.distance))
        .ok_or_else(|| Error::InvalidInput("run record has no evaluated individuals".into()))
}

/// Inserts `entry` unless an identical genotype is already present; keeps
/// the archive sorted and truncated to `capacity`. Equal distances keep
/// insertion order.
fn update_hall_of_fame(hof: &mut Vec<HallOfFameEntry>, capacity: usize, entry: HallOfFameEntry) {
    if hof.len() == capacity
        && hof
            .last()
            .is_some_and(|worst| entry.distance >= worst.distance)
    {
        return;
    }
    if hof.iter().any(|e| e.latent == entry.latent) {
        return;
    }
    let pos = hof.partition_point(|e| e.distance <= entry.distance);
    hof.insert(pos, entry);
    hof.truncate(capacity);
}

fn population_stats(
    generation: usize,
    population: &[Individual],
    best_so_far: f64,
    evaluations_so_far: usize,
) -> GenerationStats {
    let distances: Vec<f64> = population.iter().filter_map(Individual::distance).collect();
    let n = distances.len() as f64;
    let best = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = distances.iter().sum::<f64>() / n;
    let var = distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    GenerationStats {
        generation,
        best_distance: best,
        // Guard against the mean rounding below the minimum when all
        // distances are equal.
        mean_distance: mean.max(best),
        std_distance: var.sqrt(),
        best_so_far,
        evaluations_so_far,
    }
}

struct Loop<'a, E: BatchEvaluator, O: FnMut(&GenerationStats)> {
    config: &'a EvolutionConfig,
    evaluator: E,
    observer: O,
    record: RunRecord,
}

impl<E: BatchEvaluator, O: FnMut(&GenerationStats)> Loop<'_, E, O> {
    /// Evaluates every unevaluated individual in one batch call.
    fn evaluate(&mut self, population: &mut [Individual]) -> Result<()> {
        let pending: Vec<usize> = (0..population.len())
            .filter(|&i| !population[i].is_evaluated())
            .collect();
        if pending.is_empty() {
            return Ok(());
        }
        let batch: Vec<LatentVector> = pending
            .iter()
            .map(|&i| population[i].genotype().clone())
            .collect();
        let results = self.evaluator.evaluate_batch(&batch)?;
        self.record.batch_calls += 1;
        if results.len() != batch.len() {
            return Err(Error::Contract(format!(
                "evaluator returned {} results for a batch of {}",
                results.len(),
                batch.len()
            )));
        }
        self.record.evaluations += batch.len();
        for (
            &i,
            Evaluation {
                embedding,
                distance,
            },
        ) in pending.iter().zip(results)
        {
            population[i].set_distance(distance)?;
            update_hall_of_fame(
                &mut self.record.hall_of_fame,
                self.config.hall_of_fame_size,
                HallOfFameEntry {
                    distance,
                    latent: population[i].genotype().clone(),
                    embedding,
                },
            );
        }
        Ok(())
    }

    fn push_stats(&mut self, generation: usize, population: &[Individual]) {
        let best_so_far = self.record.hall_of_fame[0].distance;
        let stats = population_stats(generation, population, best_so_far, self.record.evaluations);
        log::debug!(
            "generation {generation}: best {:.6} mean {:.6} best-so-far {:.6}",
            stats.best_distance,
            stats.mean_distance,
            stats.best_so_far
        );
        (self.observer)(&stats);
        self.record.stats.push(stats);
    }

    fn vary(&self, rng: &mut Rng, offspring: &mut [Individual]) -> Result<()> {
        let c = self.config;
        for pair in offspring.chunks_exact_mut(2) {
            if rng.bernoulli(c.crossover_prob) {
                let (a, b) =
                    blx_crossover(rng, pair[0].genotype(), pair[1].genotype(), c.blx_alpha)?;
                pair[0].replace_genotype(a);
                pair[1].replace_genotype(b);
            }
        }
        for ind in offspring.iter_mut() {
            if rng.bernoulli(c.mutation_prob) {
                let mutated = gaussian_mutate(
                    rng,
                    ind.genotype(),
                    c.mutation_sigma,
                    c.per_gene_mutation_rate,
                );
                ind.replace_genotype(mutated);
            }
        }
        Ok(())
    }

    fn run(&mut self, rng: &mut Rng) -> Result<()> {
        let c = self.config;
        let mut population: Vec<Individual> = (0..c.population_size)
            .map(|_| Individual::new(init_individual(rng, c.latent_dim)))
            .collect();
        self.evaluate(&mut population)?;
        self.push_stats(0, &population);

        for generation in 1..=c.generations {
            let winners =
                tournament_indices(rng, &population, c.tournament_size, c.population_size)?;
            let mut offspring: Vec<Individual> =
                winners.into_iter().map(|i| population[i].clone()).collect();
            self.vary(rng, &mut offspring)?;
            self.evaluate(&mut offspring)?;
            population = offspring;
            self.push_stats(generation, &population);
        }
        Ok(())
    }
}

/// Runs one evolution and returns its full record.
///
/// `observer` receives each generation's statistics as soon as they are
/// computed. On evaluator failure the run stops immediately and the error
/// carries the partial record.
pub fn run_evolution<E, O>(
    config: &EvolutionConfig,
    evaluator: E,
    rng: &mut Rng,
    observer: O,
) -> std::result::Result<RunRecord, RunAborted>
where
    E: BatchEvaluator,
    O: FnMut(&GenerationStats),
{
    let started = Instant::now();
    let mut state = Loop {
        config,
        evaluator,
        observer,
        record: RunRecord::empty(config),
    };
    let checked = config.validate().and_then(|()| {
        if state.evaluator.latent_dim() != config.latent_dim
            || state.evaluator.embedding_dim() != config.embedding_dim
        {
            return Err(Error::InvalidConfig(format!(
                "evaluator dimensions ({}, {}) differ from config ({}, {})",
                state.evaluator.latent_dim(),
                state.evaluator.embedding_dim(),
                config.latent_dim,
                config.embedding_dim
            )));
        }
        if state.evaluator.target().is_none() {
            return Err(Error::TargetNotSet);
        }
        Ok(())
    });
    let outcome = checked.and_then(|()| state.run(rng));
    state.record.wall_time_secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => Ok(state.record),
        Err(source) => Err(RunAborted {
            source,
            partial: Box::new(state.record),
        }),
    }
}

/// Pure random search: `budget` N(0, I) latents evaluated in batches of
/// `batch_size`. Returns the best distance found.
pub fn random_search<E: BatchEvaluator>(
    evaluator: &mut E,
    rng: &mut Rng,
    budget: usize,
    batch_size: usize,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut remaining = budget;
    while remaining > 0 {
        let n = remaining.min(batch_size.max(1));
        let batch: Vec<LatentVector> = (0..n)
            .map(|_| init_individual(rng, evaluator.latent_dim()))
            .collect();
        for r in evaluator.evaluate_batch(&batch)? {
            best = best.min(r.distance);
        }
        remaining -= n;
    }
    Ok(best)
}
