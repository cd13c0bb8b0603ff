//! N-Tuple Bandit Evolutionary Algorithm over finite parameter grids.

mod heuristic;

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use heuristic::{action_orders, heuristic_space, point_to_params, tune_heuristic, HeuristicTuneConfig, HeuristicTuning};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TunerError {
    #[error("dimension `{0}` needs at least two values")]
    Dimension(String),
    #[error("search space has no dimensions")]
    Empty,
    #[error("budget must be at least 1")]
    Budget,
    #[error("{0}")]
    Setup(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub values: Vec<f64>,
}

/// Ordered finite value sets; points are index vectors into them.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<SearchSpace, TunerError> {
        if dims.is_empty() {
            return Err(TunerError::Empty);
        }
        if let Some(d) = dims.iter().find(|d| d.values.len() < 2) {
            return Err(TunerError::Dimension(d.name.clone()));
        }
        Ok(SearchSpace { dims })
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.dims.iter().map(|d| d.values.len()).product()
    }

    pub fn values(&self, point: &[usize]) -> Vec<f64> {
        point.iter().zip(&self.dims).map(|(&i, d)| d.values[i]).collect()
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.dims.iter().map(|d| rng.gen_range(0..d.values.len())).collect()
    }

    /// Resample one uniformly chosen dimension to a different value.
    pub fn mutate<R: Rng + ?Sized>(&self, point: &[usize], rng: &mut R) -> Vec<usize> {
        let mut out = point.to_vec();
        let d = rng.gen_range(0..self.dims.len());
        let mut v = rng.gen_range(0..self.dims[d].values.len() - 1);
        if v >= point[d] {
            v += 1;
        }
        out[d] = v;
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TupleStats {
    pub count: u64,
    pub sum: f64,
}

impl TupleStats {
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }
}

/// Fitness statistics per tuple of dimensions: every single dimension, every pair, and the
/// full point, with duplicates removed for small spaces.
#[derive(Clone, Debug)]
pub struct NTupleModel {
    tuples: Vec<Vec<usize>>,
    stats: Vec<BTreeMap<Vec<usize>, TupleStats>>,
    evaluations: u64,
}

impl NTupleModel {
    pub fn new(dimensions: usize) -> NTupleModel {
        let mut tuples: Vec<Vec<usize>> = (0..dimensions).map(|i| vec![i]).collect();
        for i in 0..dimensions {
            for j in i + 1..dimensions {
                tuples.push(vec![i, j]);
            }
        }
        let full: Vec<usize> = (0..dimensions).collect();
        if !tuples.contains(&full) {
            tuples.push(full);
        }
        let stats = vec![BTreeMap::new(); tuples.len()];
        NTupleModel { tuples, stats, evaluations: 0 }
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    fn key(tuple: &[usize], point: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&d| point[d]).collect()
    }

    pub fn add(&mut self, point: &[usize], fitness: f64) {
        for (t, tuple) in self.tuples.iter().enumerate() {
            let s = self.stats[t].entry(Self::key(tuple, point)).or_default();
            s.count += 1;
            s.sum += fitness;
        }
        self.evaluations += 1;
    }

    pub fn stats(&self, tuple: usize, point: &[usize]) -> TupleStats {
        self.stats[tuple].get(&Self::key(&self.tuples[tuple], point)).copied().unwrap_or_default()
    }

    /// Sum of counts over every tuple entry.
    pub fn total_count(&self) -> u64 {
        self.stats.iter().flat_map(|m| m.values()).map(|s| s.count).sum()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Full-tuple statistics for a point.
    pub fn full(&self, point: &[usize]) -> TupleStats {
        self.stats(self.tuples.len() - 1, point)
    }

    /// Mean of the tuple means seen so far plus `k` times the mean exploration bonus.
    pub fn ucb(&self, point: &[usize], k: f64, epsilon: f64) -> f64 {
        let ln = ((self.evaluations + 1) as f64).ln();
        let mut mean_sum = 0.0;
        let mut seen = 0;
        let mut bonus = 0.0;
        for t in 0..self.tuples.len() {
            let s = self.stats(t, point);
            if s.count > 0 {
                mean_sum += s.mean();
                seen += 1;
            }
            bonus += (ln / (s.count as f64 + epsilon)).sqrt();
        }
        let mean = if seen == 0 { 0.0 } else { mean_sum / seen as f64 };
        mean + k * bonus / self.tuples.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct NtbeaConfig {
    pub budget: usize,
    pub neighbours: usize,
    pub k_explore: f64,
    pub epsilon: f64,
}

impl Default for NtbeaConfig {
    fn default() -> Self {
        NtbeaConfig { budget: 200, neighbours: 50, k_explore: 2.0, epsilon: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub point: Vec<usize>,
    pub fitness: f64,
}

#[derive(Clone, Debug)]
pub struct NtbeaResult {
    pub best: Vec<usize>,
    pub best_stats: TupleStats,
    pub log: Vec<Evaluation>,
    pub model: NTupleModel,
}

/// Optimise `fitness`, called with the point and the evaluation index.
///
/// Each step evaluates the current point, then moves to whichever of `neighbours`
/// single-dimension mutants scores the highest UCB under the tuple model. Returns the
/// evaluated point with the best full-tuple mean, ties by count then by point order.
/// `stop` is polled between evaluations.
pub fn ntbea<R, F, S>(
    space: &SearchSpace,
    config: &NtbeaConfig,
    rng: &mut R,
    mut fitness: F,
    mut stop: S,
) -> Result<NtbeaResult, TunerError>
where
    R: Rng + ?Sized,
    F: FnMut(&[usize], usize) -> f64,
    S: FnMut() -> bool,
{
    if config.budget == 0 {
        return Err(TunerError::Budget);
    }
    let mut model = NTupleModel::new(space.dims().len());
    let mut log = Vec::with_capacity(config.budget);
    let mut current = space.random_point(rng);
    for index in 0..config.budget {
        if index > 0 && stop() {
            break;
        }
        let f = fitness(&current, index);
        model.add(&current, f);
        log.push(Evaluation { point: current.clone(), fitness: f });
        if index + 1 == config.budget {
            break;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        for _ in 0..config.neighbours.max(1) {
            let candidate = space.mutate(&current, rng);
            let u = model.ucb(&candidate, config.k_explore, config.epsilon);
            if best.as_ref().is_none_or(|(bu, _)| u > *bu) {
                best = Some((u, candidate));
            }
        }
        current = best.expect("at least one neighbour").1;
    }
    let best = log
        .iter()
        .map(|e| &e.point)
        .max_by(|a, b| {
            let (sa, sb) = (model.full(a), model.full(b));
            sa.mean().total_cmp(&sb.mean()).then(sa.count.cmp(&sb.count)).then(b.cmp(a))
        })
        .expect("at least one evaluation")
        .clone();
    Ok(NtbeaResult { best_stats: model.full(&best), best, log, model })
}

/// Evaluation log: index, per-dimension index and value, fitness.
pub fn write_eval_log<W: Write>(space: &SearchSpace, log: &[Evaluation], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["evaluation".to_string()];
    for d in space.dims() {
        header.push(format!("{}Index", d.name));
        header.push(d.name.clone());
    }
    header.push("fitness".into());
    w.write_record(&header)?;
    for (i, e) in log.iter().enumerate() {
        let mut row = vec![i.to_string()];
        for (&p, v) in e.point.iter().zip(space.values(&e.point)) {
            row.push(p.to_string());
            row.push(format!("{v}"));
        }
        row.push(format!("{}", e.fitness));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
