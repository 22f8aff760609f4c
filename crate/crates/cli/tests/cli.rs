use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use latent_evolve_cli::artifacts::{self, write_run, EvaluatorDescriptor, RunArtifacts};
use latent_evolve_core::{
    derive_child_seed, euclidean_distance, Embedding, EvolutionConfig, GenerationStats,
    HallOfFameEntry, LatentVector, RunRecord, SyntheticWorld,
};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_latent-evolve");

fn cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(
        &path,
        r#"{"latent_dim": 16, "embedding_dim": 8, "population_size": 30, "generations": 12}"#,
    )
    .unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).to_string();
    let errors: Vec<&str> = text.lines().filter(|l| l.starts_with("error:")).collect();
    assert_eq!(errors.len(), 1, "{text}");
    errors[0].to_string()
}

fn mock_worker_cmd(extra: &str) -> String {
    format!("{BIN} mock-worker --latent-dim 16 --embedding-dim 8 {extra}")
}

#[test]
fn equal_seeds_give_identical_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    for name in ["a", "b"] {
        ok(&[
            "run",
            "--config",
            s(&cfg),
            "--seed",
            "7",
            "--out",
            s(&tmp.path().join(name)),
        ]);
    }
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--seed",
        "8",
        "--out",
        s(&tmp.path().join("c")),
    ]);
    for file in [
        artifacts::STATS,
        artifacts::BEST_LATENT,
        artifacts::HALL_OF_FAME,
    ] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = fs::read(tmp.path().join("b").join(file)).unwrap();
        let c = fs::read(tmp.path().join("c").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
        assert_ne!(a, c, "{file}");
    }
}

#[test]
fn worker_flags_are_validated() {
    let tmp = TempDir::new().unwrap();
    let out = s(&tmp.path().join("r")).to_string();
    let r = cli(&[
        "run",
        "--evaluator",
        "worker",
        "--target",
        "t.png",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr_line(&r).contains("--worker-cmd"));

    let r = cli(&["run", "--worker-cmd", "python worker.py", "--out", &out]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!tmp.path().join("r").exists());
}

#[test]
fn config_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"populaton_size": 10}"#).unwrap();
    let r = cli(&[
        "run",
        "--config",
        s(&bad),
        "--out",
        s(&tmp.path().join("r")),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr_line(&r).contains("populaton_size"));

    fs::write(&bad, r#"{"tournament_size": 0}"#).unwrap();
    let r = cli(&[
        "run",
        "--config",
        s(&bad),
        "--out",
        s(&tmp.path().join("r")),
    ]);
    assert_eq!(r.status.code(), Some(1));

    let missing = tmp.path().join("missing.json");
    let r = cli(&[
        "run",
        "--config",
        s(&missing),
        "--out",
        s(&tmp.path().join("r")),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn output_path_that_is_a_file_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let file = tmp.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let r = cli(&["run", "--config", s(&cfg), "--out", s(&file.join("run"))]);
    assert_eq!(r.status.code(), Some(3));
    stderr_line(&r);
}

#[test]
fn worker_mode_matches_the_in_process_world() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let worker = mock_worker_cmd("--world-seed 3");
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--seed",
        "5",
        "--world-seed",
        "3",
        "--out",
        s(&tmp.path().join("syn")),
    ]);
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--seed",
        "5",
        "--evaluator",
        "worker",
        "--worker-cmd",
        &worker,
        "--target",
        "@optimum",
        "--out",
        s(&tmp.path().join("wrk")),
    ]);
    for file in [
        artifacts::STATS,
        artifacts::BEST_LATENT,
        artifacts::BEST_EMBEDDING,
        artifacts::HALL_OF_FAME,
    ] {
        assert_eq!(
            fs::read(tmp.path().join("syn").join(file)).unwrap(),
            fs::read(tmp.path().join("wrk").join(file)).unwrap(),
            "{file}"
        );
    }
    let meta = RunArtifacts::load(&tmp.path().join("wrk")).unwrap().meta;
    assert_eq!(
        meta.evaluator,
        EvaluatorDescriptor::Worker {
            command: worker,
            target: "@optimum".into()
        }
    );
}

#[test]
fn worker_failures_exit_2_with_one_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = s(&tmp.path().join("r")).to_string();

    let r = cli(&[
        "run",
        "--config",
        s(&cfg),
        "--evaluator",
        "worker",
        "--worker-cmd",
        &mock_worker_cmd(""),
        "--target",
        "no/such/face.png",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr_line(&r).contains("no/such/face.png"));

    let r = cli(&[
        "run",
        "--config",
        s(&cfg),
        "--evaluator",
        "worker",
        "--worker-cmd",
        "/nonexistent/worker-binary",
        "--target",
        "@optimum",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(2));
    stderr_line(&r);

    // Worker advertises 32 latent dims against a 16-dim config.
    let r = cli(&[
        "run",
        "--config",
        s(&cfg),
        "--evaluator",
        "worker",
        "--worker-cmd",
        &format!("{BIN} mock-worker --latent-dim 32 --embedding-dim 8"),
        "--target",
        "@optimum",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr_line(&r).contains("32"));
    assert!(!tmp.path().join("r").exists());
}

#[test]
fn hung_worker_is_killed_after_grace_period() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let start = Instant::now();
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--evaluator",
        "worker",
        "--worker-cmd",
        &mock_worker_cmd("--hang-on-shutdown"),
        "--target",
        "@optimum",
        "--grace-secs",
        "0.5",
        "--out",
        s(&tmp.path().join("r")),
    ]);
    assert!(start.elapsed() < Duration::from_secs(30));
    RunArtifacts::load(&tmp.path().join("r")).unwrap();
}

#[test]
fn best_latent_replays_to_the_recorded_distance() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let dir = tmp.path().join("r");
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--seed",
        "11",
        "--world-seed",
        "4",
        "--out",
        s(&dir),
    ]);
    let run = RunArtifacts::load(&dir).unwrap();
    let (world_seed, proxy_dim) = match run.meta.evaluator {
        EvaluatorDescriptor::Synthetic {
            world_seed,
            proxy_dim,
        } => (world_seed, proxy_dim),
        ref other => panic!("{other:?}"),
    };
    assert_eq!((world_seed, proxy_dim), (4, 32));
    let world = SyntheticWorld::new(world_seed, 16, proxy_dim, 8).unwrap();
    let embedding = world.embed_latent(&run.best_latent).unwrap();
    let d = euclidean_distance(embedding.as_slice(), world.target().as_slice()).unwrap();
    assert!((d - run.meta.best_distance).abs() <= 1e-6);
    assert_eq!(embedding, run.best_embedding);
}

#[test]
fn default_settings_at_512_dims_write_all_artifacts() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("r");
    ok(&["run", "--seed", "3", "--out", s(&dir)]);
    for file in artifacts::ALL_FILES {
        assert!(dir.join(file).is_file(), "{file}");
    }
    let run = RunArtifacts::load(&dir).unwrap();
    assert_eq!(
        run.meta.config,
        EvolutionConfig {
            master_seed: 3,
            ..Default::default()
        }
    );
    assert_eq!(run.best_latent.len(), 512);
    assert_eq!(run.best_embedding.len(), 128);
    assert_eq!(run.stats.len(), 501);
    assert_eq!(run.hall_of_fame.len(), 10);
    assert!(run.stats.last().unwrap().best_so_far < run.stats[0].best_distance);
}

fn read_summary(dir: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(dir.join("sweep_summary.csv")).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_layout_and_seeds() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("sweep");
    ok(&[
        "sweep",
        "--config",
        s(&cfg),
        "--grid",
        "pR=0.6,0.9;pM=0.01,0.1",
        "--repeats",
        "2",
        "--seed",
        "21",
        "--jobs",
        "3",
        "--out",
        s(&out),
    ]);
    let rows = read_summary(&out);
    assert_eq!(rows.len(), 8);
    let runs = latent_evolve_cli::report::load_runs(std::slice::from_ref(&out)).unwrap();
    assert_eq!(runs.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], i.to_string());
        assert_eq!(row[8], "ok");
        let seed = derive_child_seed(21, i as u64);
        assert_eq!(row[5], seed.to_string());
        let run = &runs[i];
        assert_eq!(run.meta.seed, seed);
        assert_eq!(row[6].parse::<f64>().unwrap(), run.meta.best_distance);
        let (p_r, p_m) = [(0.6, 0.01), (0.6, 0.1), (0.9, 0.01), (0.9, 0.1)][i / 2];
        assert_eq!(
            (
                run.meta.config.crossover_prob,
                run.meta.config.mutation_prob
            ),
            (p_r, p_m)
        );
    }
}

#[test]
fn degenerate_sweep_equals_single_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("sweep");
    ok(&[
        "sweep",
        "--config",
        s(&cfg),
        "--grid",
        "pR=0.75;pM=0.001",
        "--repeats",
        "1",
        "--seed",
        "9",
        "--out",
        s(&out),
    ]);
    let seed = derive_child_seed(9, 0).to_string();
    let single = tmp.path().join("single");
    ok(&[
        "run",
        "--config",
        s(&cfg),
        "--seed",
        &seed,
        "--out",
        s(&single),
    ]);
    let swept = latent_evolve_cli::artifacts::discover_runs(&[out]).unwrap();
    assert_eq!(swept.len(), 1);
    for file in [
        artifacts::STATS,
        artifacts::BEST_LATENT,
        artifacts::BEST_EMBEDDING,
        artifacts::HALL_OF_FAME,
    ] {
        assert_eq!(
            fs::read(swept[0].join(file)).unwrap(),
            fs::read(single.join(file)).unwrap()
        );
    }
}

#[test]
fn failed_sweep_runs_are_recorded() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("sweep");
    let r = cli(&[
        "sweep",
        "--config",
        s(&cfg),
        "--grid",
        "pR=0.5,0.7",
        "--repeats",
        "2",
        "--evaluator",
        "worker",
        "--worker-cmd",
        &mock_worker_cmd(""),
        "--target",
        "missing.png",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr_line(&r).contains("4 of 4 runs failed"));
    let rows = read_summary(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r[8].starts_with("error:") && r[6].is_empty()));
}

fn fabricated_run(dir: &Path, best: f64, embedding: Vec<f64>, generations: usize) {
    let config = EvolutionConfig {
        latent_dim: 2,
        embedding_dim: embedding.len(),
        generations,
        ..Default::default()
    };
    let stats = (0..=generations)
        .map(|g| GenerationStats {
            generation: g,
            best_distance: best + (generations - g) as f64,
            mean_distance: best + 10.0,
            std_distance: 1.0,
            best_so_far: best + (generations - g) as f64,
            evaluations_so_far: 200 * (g + 1),
        })
        .collect();
    let record = RunRecord {
        config,
        stats,
        hall_of_fame: vec![HallOfFameEntry {
            distance: best,
            latent: LatentVector::new(vec![0.5, -0.5]).unwrap(),
            embedding: Embedding::new(embedding).unwrap(),
        }],
        evaluations: 200 * (generations + 1),
        batch_calls: generations + 1,
        wall_time_secs: 1.0,
    };
    let descriptor = EvaluatorDescriptor::Worker {
        command: "worker".into(),
        target: "w3.png".into(),
    };
    write_run(dir, &record, 0, &descriptor).unwrap();
}

#[test]
fn summary_reports_deception_delta() {
    let tmp = TempDir::new().unwrap();
    let runs = tmp.path().join("runs");
    fabricated_run(&runs.join("a"), 0.420, vec![1.0, 0.0], 3);
    fabricated_run(&runs.join("b"), 0.500, vec![0.0, 1.0], 3);
    let out = tmp.path().join("report");
    ok(&[
        "report",
        "--runs",
        s(&runs),
        "--emit",
        "summary",
        "--baseline",
        "0.583",
        "--out",
        s(&out),
    ]);
    let mut r = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let headers = r.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let col = |name: &str| &rows[0][headers.iter().position(|h| h == name).unwrap()];
    assert_eq!(col("instance"), "w3.png");
    assert_eq!(col("runs"), "2");
    assert_eq!(col("min").parse::<f64>().unwrap(), 0.42);
    let delta: f64 = col("delta_percent").parse().unwrap();
    assert!((delta - 27.96).abs() < 0.005, "{delta}");
    assert_eq!(col("formatted"), "0.420 & 0.460 ± 0.057");
}

#[test]
fn diversity_and_curves_over_ten_runs() {
    let tmp = TempDir::new().unwrap();
    let runs = tmp.path().join("runs");
    for i in 0..10 {
        let angle = i as f64 * 0.3;
        fabricated_run(
            &runs.join(format!("r{i}")),
            0.4,
            vec![angle.cos(), angle.sin()],
            500,
        );
    }
    let out = tmp.path().join("report");
    ok(&[
        "report",
        "--runs",
        s(&runs),
        "--emit",
        "diversity",
        "--out",
        s(&out),
    ]);
    let mut r = csv::Reader::from_path(out.join("diversity_matrix.csv")).unwrap();
    assert_eq!(r.headers().unwrap().len(), 11);
    let m: Vec<Vec<f64>> = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .skip(1)
                .map(|v| v.parse().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(m.len(), 10);
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row[i], 0.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, m[j][i]);
        }
    }
    let expected = 2.0 * (0.3f64 * 9.0 / 2.0).sin();
    assert!((m[0][9] - expected).abs() < 1e-12);

    ok(&[
        "report",
        "--runs",
        s(&runs),
        "--emit",
        "curves",
        "--out",
        s(&out),
    ]);
    let mut r = csv::Reader::from_path(out.join("curves.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec!["generation", "run_id", "best_distance"]
    );
    assert_eq!(r.records().count(), 5010);
    let mut r = csv::Reader::from_path(out.join("runs.csv")).unwrap();
    assert_eq!(r.records().count(), 10);
}

#[test]
fn reports_are_pure_functions_of_their_inputs() {
    let tmp = TempDir::new().unwrap();
    let runs = tmp.path().join("runs");
    for i in 0..3 {
        fabricated_run(
            &runs.join(format!("r{i}")),
            0.3 + i as f64 * 0.1,
            vec![i as f64, 1.0],
            4,
        );
    }
    for emit in ["summary", "diversity", "curves"] {
        let a = tmp.path().join(format!("{emit}-a"));
        let b = tmp.path().join(format!("{emit}-b"));
        ok(&[
            "report",
            "--runs",
            s(&runs),
            "--emit",
            emit,
            "--baseline",
            "0.6",
            "--out",
            s(&a),
        ]);
        ok(&[
            "report",
            "--runs",
            s(&runs),
            "--emit",
            emit,
            "--baseline",
            "0.6",
            "--out",
            s(&b),
        ]);
        let mut names: Vec<_> = fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(
                fs::read(a.join(&name)).unwrap(),
                fs::read(b.join(&name)).unwrap()
            );
        }
    }
}

#[test]
fn corrupt_runs_exit_3_naming_the_directory() {
    let tmp = TempDir::new().unwrap();
    let runs = tmp.path().join("runs");
    fabricated_run(&runs.join("good"), 0.4, vec![1.0, 0.0], 2);
    fabricated_run(&runs.join("broken"), 0.4, vec![1.0, 0.0], 2);
    let out = s(&tmp.path().join("report")).to_string();

    fs::write(runs.join("broken").join(artifacts::BEST_LATENT), "[0.5, ").unwrap();
    let r = cli(&[
        "report",
        "--runs",
        s(&runs),
        "--emit",
        "summary",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert!(stderr_line(&r).contains("broken"));

    fs::remove_file(runs.join("broken").join(artifacts::STATS)).unwrap();
    let r = cli(&[
        "report",
        "--runs",
        s(&runs),
        "--emit",
        "summary",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert!(stderr_line(&r).contains("missing stats.csv"));

    let r = cli(&[
        "report",
        "--runs",
        s(&tmp.path().join("nowhere")),
        "--emit",
        "curves",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert!(stderr_line(&r).contains("nowhere"));
}
