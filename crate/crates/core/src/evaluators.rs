//! Batch fitness evaluation.
//!
//! An [`EmbeddingModel`] maps latent vectors to embeddings (generator
//! followed by recognition model). A [`TargetEvaluator`] wraps a model,
//! holds the target embedding and owns the distance computation, so the
//! fitness definition lives in exactly one place regardless of whether the
//! model is the in-process [`SyntheticWorld`] or a remote worker.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::types::{euclidean_distance, Embedding, LatentVector};

/// Fitness of an individual at embedding distance `distance`.
pub fn distance_to_fitness(distance: f64) -> Result<f64> {
    if distance.is_nan() || distance < 0.0 {
        return Err(Error::NegativeDistance(distance));
    }
    Ok(-distance)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub embedding: Embedding,
    pub distance: f64,
}

/// Batch fitness contract used by the engine.
///
/// `evaluate_batch` must return one result per input, positionally aligned,
/// where `distance` is the L2 distance between the input's embedding and
/// the target.
pub trait BatchEvaluator {
    fn latent_dim(&self) -> usize;
    fn embedding_dim(&self) -> usize;
    fn target(&self) -> Option<&Embedding>;
    fn evaluate_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Evaluation>>;
}

impl<E: BatchEvaluator + ?Sized> BatchEvaluator for &mut E {
    fn latent_dim(&self) -> usize {
        (**self).latent_dim()
    }
    fn embedding_dim(&self) -> usize {
        (**self).embedding_dim()
    }
    fn target(&self) -> Option<&Embedding> {
        (**self).target()
    }
    fn evaluate_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Evaluation>> {
        (**self).evaluate_batch(batch)
    }
}

/// Generator + embedder pipeline.
pub trait EmbeddingModel {
    fn latent_dim(&self) -> usize;
    fn embedding_dim(&self) -> usize;
    fn embed_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>>;
}

/// Validates a batch against the expected latent dimension.
pub fn check_batch(batch: &[LatentVector], latent_dim: usize) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    match batch.iter().position(|z| z.len() != latent_dim) {
        Some(index) => Err(Error::BatchDimension {
            index,
            expected: latent_dim,
            found: batch[index].len(),
        }),
        None => Ok(()),
    }
}

/// Evaluates latents by distance to a target embedding.
#[derive(Debug)]
pub struct TargetEvaluator<M> {
    model: M,
    target: Option<Embedding>,
}

impl<M: EmbeddingModel> TargetEvaluator<M> {
    pub fn new(model: M) -> Self {
        Self {
            model,
            target: None,
        }
    }

    pub fn with_target(model: M, target: Embedding) -> Result<Self> {
        let mut ev = Self::new(model);
        ev.set_target(target)?;
        Ok(ev)
    }

    pub fn set_target(&mut self, target: Embedding) -> Result<()> {
        if target.len() != self.model.embedding_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.model.embedding_dim(),
                found: target.len(),
            });
        }
        self.target = Some(target);
        Ok(())
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn model_mut(&mut self) -> &mut M {
        &mut self.model
    }

    pub fn into_model(self) -> M {
        self.model
    }
}

impl<M: EmbeddingModel> BatchEvaluator for TargetEvaluator<M> {
    fn latent_dim(&self) -> usize {
        self.model.latent_dim()
    }

    fn embedding_dim(&self) -> usize {
        self.model.embedding_dim()
    }

    fn target(&self) -> Option<&Embedding> {
        self.target.as_ref()
    }

    fn evaluate_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Evaluation>> {
        let target = self.target.as_ref().ok_or(Error::TargetNotSet)?;
        check_batch(batch, self.model.latent_dim())?;
        let embeddings = self.model.embed_batch(batch)?;
        if embeddings.len() != batch.len() {
            return Err(Error::Contract(format!(
                "model returned {} embeddings for a batch of {}",
                embeddings.len(),
                batch.len()
            )));
        }
        embeddings
            .into_iter()
            .enumerate()
            .map(|(index, embedding)| {
                if embedding.len() != target.len() {
                    return Err(Error::BatchDimension {
                        index,
                        expected: target.len(),
                        found: embedding.len(),
                    });
                }
                let distance = euclidean_distance(embedding.as_slice(), target.as_slice())?;
                Ok(Evaluation {
                    embedding,
                    distance,
                })
            })
            .collect()
    }
}

/// Self-contained stand-in for a generator and a recognition model with a
/// known optimum.
///
/// The generator is `x = tanh(A z)` with `A` an `m × d` matrix, and the
/// embedder is `B x` rescaled to unit length with `B` an `e × m` matrix.
/// Entries of `A` and `B` are N(0, 1) scaled by `1/√d` and `1/√m`. A hidden
/// optimum `z★ ~ N(0, I)` defines the target `t = embed(generate(z★))`.
/// Everything is drawn from one [`Rng`] seeded with `seed`, in the order
/// `A` (row-major), `B` (row-major), `z★`.
#[derive(Clone, Debug)]
pub struct SyntheticWorld {
    seed: u64,
    latent_dim: usize,
    proxy_dim: usize,
    embedding_dim: usize,
    generator: Vec<f64>,
    embedder: Vec<f64>,
    optimum: LatentVector,
    target: Embedding,
}

impl SyntheticWorld {
    pub fn new(
        seed: u64,
        latent_dim: usize,
        proxy_dim: usize,
        embedding_dim: usize,
    ) -> Result<Self> {
        if latent_dim == 0 || proxy_dim == 0 || embedding_dim == 0 {
            return Err(Error::InvalidConfig(
                "synthetic world dimensions must be positive".into(),
            ));
        }
        let mut rng = Rng::seed_from_u64(seed);
        let mut gaussian_matrix = |rows: usize, cols: usize| -> Vec<f64> {
            let scale = 1.0 / (cols as f64).sqrt();
            (0..rows * cols)
                .map(|_| rng.standard_normal() * scale)
                .collect()
        };
        let generator = gaussian_matrix(proxy_dim, latent_dim);
        let embedder = gaussian_matrix(embedding_dim, proxy_dim);
        let optimum =
            LatentVector::from_raw((0..latent_dim).map(|_| rng.standard_normal()).collect());

        let mut world = Self {
            seed,
            latent_dim,
            proxy_dim,
            embedding_dim,
            generator,
            embedder,
            optimum,
            target: Embedding::zeros(embedding_dim),
        };
        world.target = world.embed(&world.generate(&world.optimum)?)?;
        Ok(world)
    }

    /// Proxy-image size used when none is given: `2d` for small latents,
    /// 256 from 128 latent dimensions upward.
    pub fn default_proxy_dim(latent_dim: usize) -> usize {
        (2 * latent_dim).min(256)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn proxy_dim(&self) -> usize {
        self.proxy_dim
    }

    /// Row-major `proxy_dim × latent_dim` generator matrix.
    pub fn generator_matrix(&self) -> &[f64] {
        &self.generator
    }

    /// Row-major `embedding_dim × proxy_dim` embedder matrix.
    pub fn embedder_matrix(&self) -> &[f64] {
        &self.embedder
    }

    pub fn optimum(&self) -> &LatentVector {
        &self.optimum
    }

    pub fn target(&self) -> &Embedding {
        &self.target
    }

    /// Proxy image `tanh(A z)`.
    pub fn generate(&self, z: &LatentVector) -> Result<Vec<f64>> {
        if z.len() != self.latent_dim {
            return Err(Error::DimensionMismatch {
                expected: self.latent_dim,
                found: z.len(),
            });
        }
        Ok(self
            .generator
            .chunks_exact(self.latent_dim)
            .map(|row| dot(row, z.as_slice()).tanh())
            .collect())
    }

    /// Unit-normalized `B x`; the zero vector maps to itself.
    pub fn embed(&self, x: &[f64]) -> Result<Embedding> {
        if x.len() != self.proxy_dim {
            return Err(Error::DimensionMismatch {
                expected: self.proxy_dim,
                found: x.len(),
            });
        }
        let mut y: Vec<f64> = self
            .embedder
            .chunks_exact(self.proxy_dim)
            .map(|row| dot(row, x))
            .collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            y.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Embedding::from_raw(y))
    }

    pub fn embed_latent(&self, z: &LatentVector) -> Result<Embedding> {
        self.embed(&self.generate(z)?)
    }

    /// Evaluator targeting the planted optimum.
    pub fn evaluator(self) -> TargetEvaluator<Self> {
        let target = self.target.clone();
        TargetEvaluator {
            model: self,
            target: Some(target),
        }
    }

    pub fn shared_evaluator(self: &Arc<Self>) -> TargetEvaluator<Arc<Self>> {
        TargetEvaluator {
            model: Arc::clone(self),
            target: Some(self.target.clone()),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl EmbeddingModel for SyntheticWorld {
    fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    fn embed_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        (*self).embed_all(batch)
    }
}

impl EmbeddingModel for Arc<SyntheticWorld> {
    fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    fn embed_batch(&mut self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        self.embed_all(batch)
    }
}

impl SyntheticWorld {
    fn embed_all(&self, batch: &[LatentVector]) -> Result<Vec<Embedding>> {
        check_batch(batch, self.latent_dim)?;
        batch.iter().map(|z| self.embed_latent(z)).collect()
    }
}
