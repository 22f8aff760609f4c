//! On-disk layout of a finished run.
//!
//! ```text
//! <run dir>/
//!   meta.json           config echo, seed, evaluator, wall time
//!   stats.csv           one row per generation
//!   best_latent.json    best latent vector as a JSON array
//!   best_embedding.json its embedding
//!   hall_of_fame.json   archive of best individuals, ascending distance
//! ```
//!
//! Reals are written with Rust's shortest round-trip formatting, so files
//! reload bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use latent_evolve_core::{
    Embedding, EvolutionConfig, GenerationStats, HallOfFameEntry, LatentVector, RunRecord,
};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const META: &str = "meta.json";
pub const STATS: &str = "stats.csv";
pub const BEST_LATENT: &str = "best_latent.json";
pub const BEST_EMBEDDING: &str = "best_embedding.json";
pub const HALL_OF_FAME: &str = "hall_of_fame.json";

pub const ALL_FILES: [&str; 5] = [META, STATS, BEST_LATENT, BEST_EMBEDDING, HALL_OF_FAME];

/// Which evaluator produced a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluatorDescriptor {
    Synthetic { world_seed: u64, proxy_dim: usize },
    Worker { command: String, target: String },
}

impl EvaluatorDescriptor {
    /// Short label identifying the problem instance.
    pub fn instance_label(&self) -> String {
        match self {
            EvaluatorDescriptor::Synthetic {
                world_seed,
                proxy_dim,
            } => format!("synthetic(world_seed={world_seed},proxy_dim={proxy_dim})"),
            EvaluatorDescriptor::Worker { target, .. } => target.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config: EvolutionConfig,
    pub seed: u64,
    pub evaluator: EvaluatorDescriptor,
    pub best_distance: f64,
    pub evaluations: usize,
    pub batch_calls: usize,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct StatsRow {
    generation: usize,
    best_distance: f64,
    mean_distance: f64,
    std_distance: f64,
    best_so_far: f64,
    evaluations_so_far: usize,
}

impl From<&GenerationStats> for StatsRow {
    fn from(s: &GenerationStats) -> Self {
        Self {
            generation: s.generation,
            best_distance: s.best_distance,
            mean_distance: s.mean_distance,
            std_distance: s.std_distance,
            best_so_far: s.best_so_far,
            evaluations_so_far: s.evaluations_so_far,
        }
    }
}

impl From<StatsRow> for GenerationStats {
    fn from(r: StatsRow) -> Self {
        Self {
            generation: r.generation,
            best_distance: r.best_distance,
            mean_distance: r.mean_distance,
            std_distance: r.std_distance,
            best_so_far: r.best_so_far,
            evaluations_so_far: r.evaluations_so_far,
        }
    }
}

/// A run loaded back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub meta: RunMeta,
    pub stats: Vec<GenerationStats>,
    pub best_latent: LatentVector,
    pub best_embedding: Embedding,
    pub hall_of_fame: Vec<HallOfFameEntry>,
}

fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> CliResult<()> {
    let mut text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| CliError::io(path.display(), e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path.display(), e))
}

pub fn stats_csv(stats: &[GenerationStats]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in stats {
        w.serialize(StatsRow::from(s))
            .map_err(|e| CliError::io("stats.csv", e))?;
    }
    w.into_inner().map_err(|e| CliError::io("stats.csv", e))
}

/// Writes all artifact files of `record` into `dir`, creating it if needed.
pub fn write_run(
    dir: &Path,
    record: &RunRecord,
    seed: u64,
    evaluator: &EvaluatorDescriptor,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let best = record
        .hall_of_fame
        .first()
        .ok_or_else(|| CliError::Evaluator("run produced no evaluated individuals".into()))?;

    let meta = RunMeta {
        config: record.config.clone(),
        seed,
        evaluator: evaluator.clone(),
        best_distance: best.distance,
        evaluations: record.evaluations,
        batch_calls: record.batch_calls,
        wall_time_secs: record.wall_time_secs,
    };
    write_json(&dir.join(META), &meta, true)?;
    let stats = dir.join(STATS);
    fs::write(&stats, stats_csv(&record.stats)?).map_err(|e| CliError::io(stats.display(), e))?;
    write_json(&dir.join(BEST_LATENT), &best.latent, false)?;
    write_json(&dir.join(BEST_EMBEDDING), &best.embedding, false)?;
    write_json(&dir.join(HALL_OF_FAME), &record.hall_of_fame, false)?;
    Ok(())
}

fn corrupt(dir: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("corrupt run directory {}: {what}", dir.display()))
}

impl RunArtifacts {
    pub fn load(dir: &Path) -> CliResult<Self> {
        for name in ALL_FILES {
            if !dir.join(name).is_file() {
                return Err(corrupt(dir, format!("missing {name}")));
            }
        }
        let wrap = |e: CliError| corrupt(dir, e);
        let meta: RunMeta = read_json(&dir.join(META)).map_err(wrap)?;
        let mut reader = csv::Reader::from_path(dir.join(STATS)).map_err(|e| corrupt(dir, e))?;
        let stats = reader
            .deserialize::<StatsRow>()
            .map(|r| r.map(GenerationStats::from))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| corrupt(dir, format!("{STATS}: {e}")))?;
        let best_latent: LatentVector = read_json(&dir.join(BEST_LATENT)).map_err(wrap)?;
        let best_embedding: Embedding = read_json(&dir.join(BEST_EMBEDDING)).map_err(wrap)?;
        let hall_of_fame: Vec<HallOfFameEntry> =
            read_json(&dir.join(HALL_OF_FAME)).map_err(wrap)?;

        if stats.is_empty() {
            return Err(corrupt(dir, "stats.csv has no rows"));
        }
        match hall_of_fame.first() {
            Some(first) if first.latent == best_latent && first.distance == meta.best_distance => {}
            _ => return Err(corrupt(dir, "hall of fame disagrees with best_latent/meta")),
        }
        if best_latent.len() != meta.config.latent_dim
            || best_embedding.len() != meta.config.embedding_dim
        {
            return Err(corrupt(dir, "vector dimensions disagree with config"));
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            meta,
            stats,
            best_latent,
            best_embedding,
            hall_of_fame,
        })
    }

    pub fn to_record(&self) -> RunRecord {
        RunRecord {
            config: self.meta.config.clone(),
            stats: self.stats.clone(),
            hall_of_fame: self.hall_of_fame.clone(),
            evaluations: self.meta.evaluations,
            batch_calls: self.meta.batch_calls,
            wall_time_secs: self.meta.wall_time_secs,
        }
    }
}

/// Expands each path into run directories: a path holding `meta.json` is a
/// run; any other directory is searched recursively, in name order.
pub fn discover_runs(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> CliResult<()> {
        if dir.join(META).is_file() {
            out.push(dir.to_path_buf());
            return Ok(());
        }
        let mut children: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::io(dir.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        children.sort();
        for child in children {
            walk(&child, out)?;
        }
        Ok(())
    }

    let mut out = Vec::new();
    for path in paths {
        if !path.is_dir() {
            return Err(CliError::Io(format!(
                "run directory {} does not exist",
                path.display()
            )));
        }
        let before = out.len();
        walk(path, &mut out)?;
        if out.len() == before {
            return Err(CliError::Io(format!(
                "no run artifacts found under {}",
                path.display()
            )));
        }
    }
    Ok(out)
}
