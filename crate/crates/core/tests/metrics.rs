use latent_evolve_core::metrics::{
    convergence_curves, deception_delta, diversity_matrix, summarize_distances,
};
use latent_evolve_core::operators::init_individual;
use latent_evolve_core::{run_evolution, Embedding, EvolutionConfig, Rng, SyntheticWorld};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Spreadsheet-style two-pass reference: sort, then accumulate.
fn naive_summary(values: &[f64]) -> (f64, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut sum = 0.0;
    for v in values {
        sum += v;
    }
    let mean = sum / n;
    let mut ss = 0.0;
    for v in values {
        ss += (v - mean) * (v - mean);
    }
    let std = if values.len() > 1 {
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (sorted[0], mean, std)
}

fn naive_l2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += (a[i] - b[i]).powi(2);
    }
    acc.sqrt()
}

#[test]
fn summary_matches_reference_on_random_inputs() {
    let mut rng = Rng::seed_from_u64(31);
    for case in 0..100 {
        let n = 1 + case % 40;
        let values: Vec<f64> = (0..n).map(|_| 0.3 + 0.4 * rng.uniform()).collect();
        let s = summarize_distances(&values).unwrap();
        let (min, mean, std) = naive_summary(&values);
        assert_eq!(s.min, min);
        assert!(rel_close(s.mean, mean, 1e-12));
        assert!(rel_close(s.std, std, 1e-12) || (std == 0.0 && s.std == 0.0));
    }
}

#[test]
fn summary_of_thirty_synthetic_runs() {
    let cfg = EvolutionConfig {
        latent_dim: 8,
        embedding_dim: 4,
        population_size: 20,
        generations: 5,
        ..Default::default()
    };
    let world = SyntheticWorld::new(3, 8, 16, 4).unwrap();
    let bests: Vec<f64> = (0..30)
        .map(|seed| {
            let r = run_evolution(
                &cfg,
                world.clone().evaluator(),
                &mut Rng::seed_from_u64(seed),
                |_| {},
            )
            .unwrap();
            r.hall_of_fame[0].distance
        })
        .collect();
    let s = summarize_distances(&bests).unwrap();
    let (min, mean, std) = naive_summary(&bests);
    assert_eq!(s.count, 30);
    assert_eq!(s.min, min);
    assert!(rel_close(s.mean, mean, 1e-12));
    assert!(rel_close(s.std, std, 1e-12));
}

#[test]
fn diversity_matches_brute_force_on_random_inputs() {
    let mut rng = Rng::seed_from_u64(32);
    for case in 0..100 {
        let n = 2 + case % 11;
        let dim = 1 + case % 16;
        let embeddings: Vec<Embedding> = (0..n)
            .map(|_| Embedding::new(init_individual(&mut rng, dim).into_inner()).unwrap())
            .collect();
        let m = diversity_matrix(&embeddings).unwrap();
        assert_eq!(m.size(), n);
        let mut off = Vec::new();
        for i in 0..n {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                let expected = naive_l2(embeddings[i].as_slice(), embeddings[j].as_slice());
                assert!(rel_close(m.get(i, j), expected, 1e-12));
                assert_eq!(m.get(i, j), m.get(j, i));
                if i < j {
                    off.push(expected);
                }
            }
        }
        let (min, mean, std) = naive_summary(&off);
        let max = off.iter().copied().fold(f64::MIN, f64::max);
        assert!(rel_close(m.summary.min, min, 1e-12));
        assert!(rel_close(m.summary.max, max, 1e-12));
        assert!(rel_close(m.summary.mean, mean, 1e-12));
        assert!(rel_close(m.summary.std, std, 1e-12) || std == 0.0);
    }
}

#[test]
fn curves_have_one_row_per_run_and_generation() {
    let cfg = EvolutionConfig {
        latent_dim: 8,
        embedding_dim: 4,
        population_size: 10,
        generations: 3,
        ..Default::default()
    };
    let world = SyntheticWorld::new(4, 8, 16, 4).unwrap();
    let records: Vec<_> = (0..2)
        .map(|seed| {
            let cfg = EvolutionConfig {
                master_seed: seed,
                ..cfg.clone()
            };
            run_evolution(
                &cfg,
                world.clone().evaluator(),
                &mut Rng::seed_from_u64(seed),
                |_| {},
            )
            .unwrap()
        })
        .collect();
    let one = convergence_curves(&records[..1]).unwrap();
    assert_eq!(one.len(), 4);
    let rows = convergence_curves(&records).unwrap();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(
            row.best_distance,
            records[row.run_id].stats[row.generation].best_distance
        );
    }
}

proptest! {
    #[test]
    fn diversity_is_permutation_equivariant(
        raw in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 5), 2..8),
        rotate in 0usize..8,
    ) {
        let embeddings: Vec<Embedding> =
            raw.into_iter().map(|v| Embedding::new(v).unwrap()).collect();
        let n = embeddings.len();
        let perm: Vec<usize> = (0..n).rev().map(|i| (i + rotate) % n).collect();
        let permuted: Vec<Embedding> = perm.iter().map(|&i| embeddings[i].clone()).collect();
        let a = diversity_matrix(&embeddings).unwrap();
        let b = diversity_matrix(&permuted).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
            }
        }
        prop_assert_eq!(a.summary.min, b.summary.min);
        prop_assert_eq!(a.summary.max, b.summary.max);
        prop_assert!(rel_close(a.summary.mean, b.summary.mean, 1e-12));
        prop_assert!((a.summary.std - b.summary.std).abs() <= 1e-12);
    }

    #[test]
    fn deception_delta_is_scale_invariant(
        fake in 0.0f64..2.0,
        baseline in 0.01f64..2.0,
        scale in 0.01f64..100.0,
    ) {
        let a = deception_delta(fake, baseline).unwrap();
        let b = deception_delta(fake * scale, baseline * scale).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
