/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Exact `P(X <= k)` for `X ~ Binomial(n, p)`.
///
/// Probabilities are built by the ratio recurrence outwards from the mode and then
/// normalised, which stays accurate where direct powers would underflow.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    if k >= n {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);
    let ratio_up = p / (1.0 - p);
    let mut weights = vec![0.0f64; n as usize + 1];
    weights[mode as usize] = 1.0;
    let mut w = 1.0;
    for i in mode..n {
        w *= (n - i) as f64 / (i + 1) as f64 * ratio_up;
        weights[i as usize + 1] = w;
        if w == 0.0 {
            break;
        }
    }
    let mut w = 1.0;
    for i in (1..=mode).rev() {
        w *= i as f64 / (n - i + 1) as f64 / ratio_up;
        weights[i as usize - 1] = w;
        if w == 0.0 {
            break;
        }
    }
    let total: f64 = weights.iter().sum();
    let below: f64 = weights[..=k as usize].iter().sum();
    (below / total).min(1.0)
}

/// Agents not significantly worse than the column's best, by a one-tailed exact binomial
/// test with the best observed rate as the null. The best itself is always marked.
pub fn binomial_best(wins: &[u64], games: &[u64], alpha: f64) -> Vec<bool> {
    assert_eq!(wins.len(), games.len());
    let rate = |i: usize| if games[i] == 0 { f64::NEG_INFINITY } else { wins[i] as f64 / games[i] as f64 };
    let Some(best) = (0..wins.len()).max_by(|&a, &b| rate(a).total_cmp(&rate(b))) else {
        return Vec::new();
    };
    let p_best = rate(best);
    (0..wins.len())
        .map(|i| {
            if i == best {
                return true;
            }
            if games[i] == 0 {
                return false;
            }
            binomial_cdf(wins[i], games[i], p_best) >= alpha
        })
        .collect()
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: f64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Half-points from draws rounded to whole wins for the exact tests.
pub fn whole_wins(points: f64) -> u64 {
    points.round().max(0.0) as u64
}
