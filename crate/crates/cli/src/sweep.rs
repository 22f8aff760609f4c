//! Parameter sweeps over crossover and mutation probabilities.
//!
//! Runs are enumerated grid-major: cells in `pR`-outer, `pM`-inner order,
//! and within a cell by repeat. Run `i` of that enumeration uses seed
//! `derive_child_seed(master_seed, i)`, so any single run can be reproduced
//! with `latent-evolve run --seed <seed>` and the cell's probabilities.

use std::path::{Path, PathBuf};

use latent_evolve_core::{derive_child_seed, EvolutionConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{load_config, SweepArgs};
use crate::error::{CliError, CliResult};
use crate::evaluator::EvaluatorSpec;
use crate::run::execute_run;

pub const SUMMARY_FILE: &str = "sweep_summary.csv";

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub crossover_probs: Vec<f64>,
    pub mutation_probs: Vec<f64>,
}

impl Grid {
    /// Parses `pR=a,b,...;pM=c,d,...`. A missing key keeps the base
    /// config's single value.
    pub fn parse(text: &str, base: &EvolutionConfig) -> CliResult<Self> {
        let mut grid = Grid {
            crossover_probs: vec![base.crossover_prob],
            mutation_probs: vec![base.mutation_prob],
        };
        let bad = |msg: String| CliError::Config(format!("invalid --grid {text:?}: {msg}"));
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=values, got {part:?}")))?;
            let values = values
                .split(',')
                .map(|v| {
                    let p: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad number {v:?}")))?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(bad(format!("probability {p} outside [0, 1]")));
                    }
                    Ok(p)
                })
                .collect::<CliResult<Vec<f64>>>()?;
            match key.trim() {
                "pR" => grid.crossover_probs = values,
                "pM" => grid.mutation_probs = values,
                other => return Err(bad(format!("unknown key {other:?} (expected pR or pM)"))),
            }
        }
        Ok(grid)
    }

    /// Cells in grid-major order.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.crossover_probs
            .iter()
            .flat_map(|&r| self.mutation_probs.iter().map(move |&m| (r, m)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannedRun {
    pub run_index: usize,
    pub cell: usize,
    pub repeat: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub seed: u64,
    pub dir: PathBuf,
}

pub fn plan(grid: &Grid, repeats: usize, master_seed: u64, out: &Path) -> Vec<PlannedRun> {
    grid.cells()
        .into_iter()
        .enumerate()
        .flat_map(|(cell, (r, m))| (0..repeats).map(move |repeat| (cell, r, m, repeat)))
        .enumerate()
        .map(|(run_index, (cell, r, m, repeat))| PlannedRun {
            run_index,
            cell,
            repeat,
            crossover_prob: r,
            mutation_prob: m,
            seed: derive_child_seed(master_seed, run_index as u64),
            dir: out
                .join(format!("cell{cell:02}"))
                .join(format!("run{repeat:03}")),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    run_index: usize,
    cell: usize,
    repeat: usize,
    p_r: f64,
    p_m: f64,
    seed: u64,
    best_distance: Option<f64>,
    wall_time_secs: Option<f64>,
    status: String,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub runs: usize,
    pub failures: Vec<(usize, CliError)>,
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<SweepOutcome> {
    let base = load_config(args.config.as_ref())?;
    let spec = args.evaluator.spec()?;
    if args.repeats == 0 {
        return Err(CliError::Config("--repeats must be at least 1".into()));
    }
    if args.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let grid = Grid::parse(&args.grid, &base)?;
    let master_seed = args.seed.unwrap_or(base.master_seed);
    let runs = plan(&grid, args.repeats, master_seed, &args.out);
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(args.out.display(), e))?;
    log::info!(
        "sweep: {} cell(s) x {} repeat(s) = {} runs, {} job(s)",
        grid.cells().len(),
        args.repeats,
        runs.len(),
        args.jobs
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} jobs: {e}", args.jobs)))?;
    let results: Vec<_> = pool.install(|| {
        runs.par_iter()
            .map(|run| run_cell(&base, &spec, run))
            .collect()
    });

    let mut writer = csv::Writer::from_path(args.out.join(SUMMARY_FILE))
        .map_err(|e| CliError::io(SUMMARY_FILE, e))?;
    let mut failures = Vec::new();
    for (run, result) in runs.iter().zip(results) {
        let (best_distance, wall_time_secs, status) = match result {
            Ok(o) => (
                Some(o.best_distance),
                Some(o.wall_time_secs),
                "ok".to_string(),
            ),
            Err(e) => {
                log::error!("run {} ({}) failed: {e}", run.run_index, run.dir.display());
                let status = format!("error: {e}");
                failures.push((run.run_index, e));
                (None, None, status)
            }
        };
        writer
            .serialize(SummaryRow {
                run_index: run.run_index,
                cell: run.cell,
                repeat: run.repeat,
                p_r: run.crossover_prob,
                p_m: run.mutation_prob,
                seed: run.seed,
                best_distance,
                wall_time_secs,
                status,
            })
            .map_err(|e| CliError::io(SUMMARY_FILE, e))?;
    }
    writer.flush().map_err(|e| CliError::io(SUMMARY_FILE, e))?;
    Ok(SweepOutcome {
        runs: runs.len(),
        failures,
    })
}

fn run_cell(
    base: &EvolutionConfig,
    spec: &EvaluatorSpec,
    run: &PlannedRun,
) -> CliResult<crate::run::RunOutcome> {
    let config = EvolutionConfig {
        crossover_prob: run.crossover_prob,
        mutation_prob: run.mutation_prob,
        ..base.clone()
    };
    execute_run(&config, run.seed, spec, &run.dir)
}
