//! Variation and selection operators for real-coded latent genotypes.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::types::{Individual, LatentVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub blx_alpha: f64,
    pub tournament_size: usize,
    pub mutation_sigma: f64,
    pub per_gene_mutation_rate: f64,
}

impl OperatorParams {
    pub fn validate(&self) -> Result<()> {
        if !self.blx_alpha.is_finite() || self.blx_alpha < 0.0 {
            return Err(Error::InvalidConfig(
                "blx_alpha must be non-negative".into(),
            ));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidConfig(
                "tournament_size must be positive".into(),
            ));
        }
        if !self.mutation_sigma.is_finite() || self.mutation_sigma <= 0.0 {
            return Err(Error::InvalidConfig(
                "mutation_sigma must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.per_gene_mutation_rate) {
            return Err(Error::InvalidConfig(
                "per_gene_mutation_rate must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Samples a genotype with i.i.d. N(0, 1) components.
pub fn init_individual(rng: &mut Rng, latent_dim: usize) -> LatentVector {
    LatentVector::from_raw((0..latent_dim).map(|_| rng.standard_normal()).collect())
}

/// Runs `count` tournaments of size `k` and returns the winners' indices.
///
/// Competitors are drawn uniformly with replacement. The highest fitness
/// wins; on ties the earliest-drawn competitor is kept.
pub fn tournament_indices(
    rng: &mut Rng,
    population: &[Individual],
    k: usize,
    count: usize,
) -> Result<Vec<usize>> {
    if population.is_empty() {
        return Err(Error::Contract("tournament on an empty population".into()));
    }
    if k == 0 || k > population.len() {
        return Err(Error::Contract(format!(
            "tournament size {k} must be in 1..={}",
            population.len()
        )));
    }
    let fitness = population
        .iter()
        .enumerate()
        .map(|(i, ind)| {
            ind.fitness()
                .ok_or_else(|| Error::Contract(format!("individual {i} has not been evaluated")))
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok((0..count)
        .map(|_| {
            let mut best = rng.index(population.len());
            for _ in 1..k {
                let challenger = rng.index(population.len());
                if fitness[challenger] > fitness[best] {
                    best = challenger;
                }
            }
            best
        })
        .collect())
}

/// Tournament selection returning clones of the winners.
pub fn tournament_select(
    rng: &mut Rng,
    population: &[Individual],
    k: usize,
    count: usize,
) -> Result<Vec<Individual>> {
    Ok(tournament_indices(rng, population, k, count)?
        .into_iter()
        .map(|i| population[i].clone())
        .collect())
}

/// Blend crossover (BLX-α).
///
/// For every gene, with `a`/`b` the smaller/larger parent value and
/// `I = b - a`, each child's gene is drawn uniformly from
/// `[a - αI, b + αI]`, independently per gene and per child.
pub fn blx_crossover(
    rng: &mut Rng,
    parent1: &LatentVector,
    parent2: &LatentVector,
    alpha: f64,
) -> Result<(LatentVector, LatentVector)> {
    if parent1.len() != parent2.len() {
        return Err(Error::DimensionMismatch {
            expected: parent1.len(),
            found: parent2.len(),
        });
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidInput(format!(
            "blx alpha must be non-negative, got {alpha}"
        )));
    }
    let n = parent1.len();
    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    for (&x, &y) in parent1.as_slice().iter().zip(parent2.as_slice()) {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let ext = alpha * (b - a);
        let (lo, hi) = (a - ext, b + ext);
        let mut draw = || (lo + rng.uniform() * (hi - lo)).clamp(lo, hi);
        c1.push(draw());
        c2.push(draw());
    }
    Ok((LatentVector::from_raw(c1), LatentVector::from_raw(c2)))
}

/// Gaussian mutation: each gene independently, with probability
/// `per_gene_rate`, receives additive N(0, σ²) noise.
pub fn gaussian_mutate(
    rng: &mut Rng,
    genotype: &LatentVector,
    sigma: f64,
    per_gene_rate: f64,
) -> LatentVector {
    LatentVector::from_raw(
        genotype
            .as_slice()
            .iter()
            .map(|&g| {
                if rng.bernoulli(per_gene_rate) {
                    g + sigma * rng.standard_normal()
                } else {
                    g
                }
            })
            .collect(),
    )
}
