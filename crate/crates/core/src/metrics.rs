//! Quality, diversity and convergence metrics over finished runs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::RunRecord;
use crate::error::{Error, Result};
use crate::types::{euclidean_distance, Embedding};

/// Min, mean and sample standard deviation (n − 1 denominator; 0 for a
/// single value) of a set of distances.
///
/// Displays as `min & mean ± std` with three decimals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub std: f64,
}

fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn summarize_distances(values: &[f64]) -> Result<DistanceSummary> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "cannot summarize an empty set of distances".into(),
        ));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::NegativeDistance(*v));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let (mean, std) = mean_and_sample_std(values);
    Ok(DistanceSummary {
        count: values.len(),
        min,
        mean: mean.max(min),
        std,
    })
}

impl fmt::Display for DistanceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} & {:.3} ± {:.3}", self.min, self.mean, self.std)
    }
}

fn parse_reals<const N: usize>(s: &str, separators: &[&str]) -> Result<[f64; N]> {
    let mut rest = s.trim();
    let mut out = [0.0; N];
    for (i, slot) in out.iter_mut().enumerate() {
        let field = if i < separators.len() {
            let (head, tail) = rest.split_once(separators[i]).ok_or_else(|| {
                Error::InvalidInput(format!("expected '{}' in {s:?}", separators[i].trim()))
            })?;
            rest = tail;
            head
        } else {
            rest
        };
        *slot = field
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad number {field:?} in {s:?}")))?;
    }
    Ok(out)
}

impl FromStr for DistanceSummary {
    type Err = Error;

    /// Parses the `min & mean ± std` rendering. `count` is unknown and set to 0.
    fn from_str(s: &str) -> Result<Self> {
        let [min, mean, std] = parse_reals::<3>(s, &["&", "±"])?;
        Ok(Self {
            count: 0,
            min,
            mean,
            std,
        })
    }
}

/// Relative reduction, in percent, of the synthetic image's distance to the
/// target versus the distance between two genuine images of the target.
pub fn deception_delta(target_vs_fake: f64, baseline: f64) -> Result<f64> {
    if !baseline.is_finite() || baseline <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "baseline must be positive, got {baseline}"
        )));
    }
    if target_vs_fake.is_nan() || target_vs_fake < 0.0 {
        return Err(Error::NegativeDistance(target_vs_fake));
    }
    Ok(100.0 * (baseline - target_vs_fake) / baseline)
}

/// Off-diagonal statistics of a diversity matrix: min, max, mean and sample
/// std over the `n(n-1)/2` distinct pairs.
///
/// Displays as `min & max & mean ± std` with three decimals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl fmt::Display for DiversitySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.3} & {:.3} & {:.3} ± {:.3}",
            self.min, self.max, self.mean, self.std
        )
    }
}

impl FromStr for DiversitySummary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let [min, max, mean, std] = parse_reals::<4>(s, &["&", "&", "±"])?;
        Ok(Self {
            min,
            max,
            mean,
            std,
        })
    }
}

/// Pairwise Euclidean distances between solution embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct DiversityMatrix {
    n: usize,
    entries: Vec<f64>,
    pub summary: DiversitySummary,
}

impl DiversityMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }
}

pub fn diversity_matrix(embeddings: &[Embedding]) -> Result<DiversityMatrix> {
    let n = embeddings.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "diversity needs at least 2 embeddings, got {n}"
        )));
    }
    let mut entries = vec![0.0; n * n];
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean_distance(embeddings[i].as_slice(), embeddings[j].as_slice())?;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
            pairs.push(d);
        }
    }
    let (mean, std) = mean_and_sample_std(&pairs);
    let min = pairs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = pairs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DiversityMatrix {
        n,
        entries,
        summary: DiversitySummary {
            min,
            max,
            mean: mean.clamp(min, max),
            std,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub generation: usize,
    pub run_id: usize,
    pub best_distance: f64,
}

/// Long-format per-generation population-best distances, one row per
/// (run, generation), runs in input order.
pub fn convergence_curves(records: &[RunRecord]) -> Result<Vec<CurvePoint>> {
    if let Some(first) = records.first() {
        if let Some(i) = records
            .iter()
            .position(|r| !r.config.same_search(&first.config))
        {
            return Err(Error::InvalidInput(format!(
                "run {i} was produced with a different configuration than run 0"
            )));
        }
    }
    Ok(records
        .iter()
        .enumerate()
        .flat_map(|(run_id, r)| {
            r.stats.iter().map(move |s| CurvePoint {
                generation: s.generation,
                run_id,
                best_distance: s.best_distance,
            })
        })
        .collect())
}
