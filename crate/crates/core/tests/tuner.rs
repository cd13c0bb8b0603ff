mod common;

use std::collections::BTreeMap;

use groundwar::engine::GameParams;
use groundwar::search::SearchSettings;
use groundwar::tuner::{
    heuristic_space, ntbea, tune_heuristic, write_eval_log, Dimension, HeuristicTuneConfig, NtbeaConfig, SearchSpace,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dim(name: &str, n: usize) -> Dimension {
    Dimension { name: name.into(), values: (0..n).map(|v| v as f64).collect() }
}

#[test]
fn finds_the_peak_of_unimodal_landscapes() {
    let mut hits = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = [rng.gen_range(5..=10), rng.gen_range(5..=10), rng.gen_range(3..=5)];
        assert!(sizes.iter().product::<usize>() <= 500);
        let space = SearchSpace::new(vec![dim("a", sizes[0]), dim("b", sizes[1]), dim("c", sizes[2])]).unwrap();
        let (peak, weights) = common::landscape(&mut rng, &sizes);
        let cfg = NtbeaConfig { budget: 200, ..NtbeaConfig::default() };
        let r = ntbea(&space, &cfg, &mut rng, |p, _| common::height(p, &peak, &weights), || false).unwrap();
        hits += (r.best == peak) as u32;
    }
    assert!(hits >= 18, "{hits}/20 runs found the peak");
}

#[test]
fn stops_when_asked() {
    let space = SearchSpace::new(vec![dim("a", 4), dim("b", 4)]).unwrap();
    let mut calls = 0;
    let r = ntbea(&space, &NtbeaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0), |p, _| p[0] as f64, || {
        calls += 1;
        calls > 9
    })
    .unwrap();
    assert_eq!(r.log.len(), 10);
}

#[test]
fn log_csv_lists_every_evaluation() {
    let space = SearchSpace::new(vec![dim("a", 3), dim("b", 5)]).unwrap();
    let cfg = NtbeaConfig { budget: 12, ..NtbeaConfig::default() };
    let r = ntbea(&space, &cfg, &mut ChaCha8Rng::seed_from_u64(4), |p, _| (p[0] * p[1]) as f64, || false).unwrap();
    let mut out = Vec::new();
    write_eval_log(&space, &r.log, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "evaluation,aIndex,a,bIndex,b,fitness");
    assert_eq!(lines.count(), 12);
}

#[test]
fn tuning_against_h0_beats_it() {
    let mut settings = SearchSettings::default();
    settings.rhea.iterations = 1;
    let config = HeuristicTuneConfig {
        target: "H0".parse().unwrap(),
        games_per_evaluation: 4,
        ntbea: NtbeaConfig { budget: 40, ..NtbeaConfig::default() },
        seed: 3,
        params: GameParams::default(),
        settings,
    };
    let tuned = tune_heuristic(&config, 4, None).unwrap();
    assert!(tuned.complete);
    assert_eq!(tuned.result.log.len(), 40);
    assert_eq!(tuned.space, heuristic_space());
    assert!(tuned.result.best_stats.mean() > 0.0, "{:?}", tuned.result.best_stats);
    let again = tune_heuristic(&config, 1, None).unwrap();
    assert_eq!(again.result.log, tuned.result.log);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn model_matches_the_raw_log(seed in any::<u64>(), sizes in proptest::collection::vec(2usize..6, 1..5), budget in 1usize..60) {
        let dims: Vec<Dimension> = sizes.iter().enumerate().map(|(i, &n)| dim(&format!("d{i}"), n)).collect();
        let space = SearchSpace::new(dims).unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let noisy: Vec<f64> = (0..budget).map(|_| noise.gen_range(-1.0..1.0)).collect();
        let cfg = NtbeaConfig { budget, neighbours: 5, ..NtbeaConfig::default() };
        let r = ntbea(&space, &cfg, &mut ChaCha8Rng::seed_from_u64(seed), |p, i| p[0] as f64 + noisy[i], || false).unwrap();
        let model = &r.model;
        prop_assert_eq!(r.log.len(), budget);
        prop_assert_eq!(model.evaluations(), budget as u64);
        prop_assert_eq!(model.total_count(), (budget * model.tuples().len()) as u64);
        for (t, tuple) in model.tuples().iter().enumerate() {
            let mut recomputed: BTreeMap<Vec<usize>, (u64, f64)> = BTreeMap::new();
            for e in &r.log {
                let key: Vec<usize> = tuple.iter().map(|&d| e.point[d]).collect();
                let s = recomputed.entry(key).or_default();
                s.0 += 1;
                s.1 += e.fitness;
            }
            for e in &r.log {
                let key: Vec<usize> = tuple.iter().map(|&d| e.point[d]).collect();
                let (count, sum) = recomputed[&key];
                let s = model.stats(t, &e.point);
                prop_assert_eq!(s.count, count);
                prop_assert!((s.mean() - sum / count as f64).abs() < 1e-12);
            }
        }
        let best_mean = r.best_stats.mean();
        for e in &r.log {
            prop_assert!(model.full(&e.point).mean() <= best_mean + 1e-12);
        }
    }

    #[test]
    fn mutation_changes_exactly_one_dimension(seed in any::<u64>(), sizes in proptest::collection::vec(2usize..8, 1..5)) {
        let dims: Vec<Dimension> = sizes.iter().enumerate().map(|(i, &n)| dim(&format!("d{i}"), n)).collect();
        let space = SearchSpace::new(dims).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = space.random_point(&mut rng);
        let q = space.mutate(&p, &mut rng);
        prop_assert_eq!(p.iter().zip(&q).filter(|(a, b)| a != b).count(), 1);
        prop_assert!(q.iter().zip(&sizes).all(|(&v, &n)| v < n));
    }

    #[test]
    fn total_count_grows_by_the_tuple_count(points in proptest::collection::vec(proptest::collection::vec(0usize..4, 3), 1..30)) {
        let mut model = groundwar::tuner::NTupleModel::new(3);
        let per = model.tuples().len() as u64;
        prop_assert_eq!(per, 7);
        for (i, p) in points.iter().enumerate() {
            let before = model.total_count();
            model.add(p, i as f64);
            prop_assert_eq!(model.total_count(), before + per);
        }
    }
}
