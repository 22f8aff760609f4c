//! Reports over finished run directories.
//!
//! | `--emit`    | files written                                      |
//! |-------------|----------------------------------------------------|
//! | `summary`   | `summary.csv`                                      |
//! | `diversity` | `diversity_matrix.csv`, `diversity_summary.csv`, `runs.csv` |
//! | `curves`    | `curves.csv`, `runs.csv`                           |
//!
//! `runs.csv` maps the integer run ids used in the other files to run
//! directories, in discovery order.

use std::fs;
use std::path::{Path, PathBuf};

use latent_evolve_core::metrics::{
    convergence_curves, deception_delta, diversity_matrix, summarize_distances,
};
use latent_evolve_core::{Embedding, EvolutionConfig};
use serde::Serialize;

use crate::artifacts::{discover_runs, RunArtifacts};
use crate::cli::{Emit, ReportArgs};
use crate::error::{CliError, CliResult};

pub const SUMMARY_CSV: &str = "summary.csv";
pub const DIVERSITY_MATRIX_CSV: &str = "diversity_matrix.csv";
pub const DIVERSITY_SUMMARY_CSV: &str = "diversity_summary.csv";
pub const CURVES_CSV: &str = "curves.csv";
pub const RUNS_CSV: &str = "runs.csv";

#[derive(Debug, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    pub latent_dim: usize,
    pub population_size: usize,
    pub generations: usize,
    pub p_r: f64,
    pub p_m: f64,
    pub runs: usize,
    pub min: f64,
    pub mean: f64,
    pub std: f64,
    pub formatted: String,
    pub baseline: Option<f64>,
    pub delta_percent: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RunIndexRow<'a> {
    run_id: usize,
    seed: u64,
    best_distance: f64,
    dir: &'a str,
}

#[derive(Debug, Serialize)]
struct DiversitySummaryRow {
    solutions: usize,
    min: f64,
    max: f64,
    mean: f64,
    std: f64,
    formatted: String,
}

pub fn load_runs(paths: &[PathBuf]) -> CliResult<Vec<RunArtifacts>> {
    discover_runs(paths)?
        .iter()
        .map(|dir| RunArtifacts::load(dir))
        .collect()
}

/// Groups runs by problem instance and search settings (everything but the
/// seed), in order of first appearance, and summarizes best distances.
pub fn summary_rows(runs: &[RunArtifacts], baseline: Option<f64>) -> CliResult<Vec<SummaryRow>> {
    let mut groups: Vec<(String, &EvolutionConfig, Vec<f64>)> = Vec::new();
    for run in runs {
        let instance = run.meta.evaluator.instance_label();
        let config = &run.meta.config;
        match groups
            .iter_mut()
            .find(|(i, c, _)| *i == instance && c.same_search(config))
        {
            Some((_, _, d)) => d.push(run.meta.best_distance),
            None => groups.push((instance, config, vec![run.meta.best_distance])),
        }
    }
    groups
        .into_iter()
        .map(|(instance, config, distances)| {
            let s = summarize_distances(&distances)
                .map_err(|e| CliError::Io(format!("{instance}: {e}")))?;
            let delta_percent = baseline
                .map(|b| deception_delta(s.min, b))
                .transpose()
                .map_err(|e| CliError::Config(format!("--baseline: {e}")))?;
            Ok(SummaryRow {
                instance,
                latent_dim: config.latent_dim,
                population_size: config.population_size,
                generations: config.generations,
                p_r: config.crossover_prob,
                p_m: config.mutation_prob,
                runs: s.count,
                min: s.min,
                mean: s.mean,
                std: s.std,
                formatted: s.to_string(),
                baseline,
                delta_percent,
            })
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> CliResult<()> {
    let err = |e: csv::Error| CliError::io(path.display(), e);
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path.display(), e))
}

fn write_run_index(out: &Path, runs: &[RunArtifacts]) -> CliResult<()> {
    let dirs: Vec<String> = runs.iter().map(|r| r.dir.display().to_string()).collect();
    write_csv(
        &out.join(RUNS_CSV),
        runs.iter()
            .zip(&dirs)
            .enumerate()
            .map(|(run_id, (r, dir))| RunIndexRow {
                run_id,
                seed: r.meta.seed,
                best_distance: r.meta.best_distance,
                dir,
            }),
    )
}

fn write_diversity(out: &Path, runs: &[RunArtifacts]) -> CliResult<()> {
    let embeddings: Vec<Embedding> = runs.iter().map(|r| r.best_embedding.clone()).collect();
    let matrix = diversity_matrix(&embeddings).map_err(|e| CliError::Config(e.to_string()))?;

    let path = out.join(DIVERSITY_MATRIX_CSV);
    let err = |e: csv::Error| CliError::io(path.display(), e);
    let mut w = csv::Writer::from_path(&path).map_err(err)?;
    let header: Vec<String> = std::iter::once("run_id".to_string())
        .chain((0..matrix.size()).map(|i| i.to_string()))
        .collect();
    w.write_record(&header).map_err(err)?;
    for (i, row) in matrix.rows().enumerate() {
        let record: Vec<String> = std::iter::once(i.to_string())
            .chain(row.iter().map(f64::to_string))
            .collect();
        w.write_record(&record).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path.display(), e))?;

    let s = matrix.summary;
    write_csv(
        &out.join(DIVERSITY_SUMMARY_CSV),
        [DiversitySummaryRow {
            solutions: matrix.size(),
            min: s.min,
            max: s.max,
            mean: s.mean,
            std: s.std,
            formatted: s.to_string(),
        }],
    )?;
    log::info!("diversity over {} solutions: {s}", matrix.size());
    write_run_index(out, runs)
}

fn write_curves(out: &Path, runs: &[RunArtifacts]) -> CliResult<()> {
    let records: Vec<_> = runs.iter().map(RunArtifacts::to_record).collect();
    let points = convergence_curves(&records).map_err(|e| {
        CliError::Config(format!("{e}; curves need runs of a single configuration"))
    })?;
    write_csv(&out.join(CURVES_CSV), &points)?;
    write_run_index(out, runs)
}

pub fn cmd_report(args: &ReportArgs) -> CliResult<()> {
    let runs = load_runs(&args.runs)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(args.out.display(), e))?;
    log::info!("report over {} run(s)", runs.len());
    match args.emit {
        Emit::Summary => {
            let rows = summary_rows(&runs, args.baseline)?;
            for r in &rows {
                match r.delta_percent {
                    Some(d) => log::info!(
                        "{} p_R={} p_M={}: {} (Δ {d:.2}%)",
                        r.instance,
                        r.p_r,
                        r.p_m,
                        r.formatted
                    ),
                    None => log::info!(
                        "{} p_R={} p_M={}: {}",
                        r.instance,
                        r.p_r,
                        r.p_m,
                        r.formatted
                    ),
                }
            }
            write_csv(&args.out.join(SUMMARY_CSV), &rows)
        }
        Emit::Diversity => write_diversity(&args.out, &runs),
        Emit::Curves => write_curves(&args.out, &runs),
    }
}
