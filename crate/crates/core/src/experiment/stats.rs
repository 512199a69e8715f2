use std::collections::BTreeMap;

use serde::Serialize;

pub const Z95: f64 = 1.959964;
pub const Z99: f64 = 2.575829;

/// Closed interval `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile
/// `z`. Clamped so that it always contains the point estimate.
pub fn wilson(successes: u64, trials: u64, z: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Interval { low: (center - half).clamp(0.0, p), high: (center + half).clamp(p, 1.0) }
}

/// Sample mean, sample standard deviation and standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub ci95: Interval,
}

pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    assert!(!values.is_empty());
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_dev = var.sqrt();
    let std_error = std_dev / n.sqrt();
    let ci95 = Interval { low: mean - Z95 * std_error, high: mean + Z95 * std_error };
    MeanEstimate { mean, std_dev, std_error, ci95 }
}

/// Bucket that absorbs theoretical mass outside the listed outcomes.
pub const OTHER: &str = "other";

/// `½ Σ |emp - thy|` over the union of outcomes. Theory mass not assigned
/// to any outcome goes to [`OTHER`], as does any empirical `OTHER` entry.
pub fn total_variation(empirical: &BTreeMap<String, f64>, theory: &BTreeMap<String, f64>) -> f64 {
    let mut keys: Vec<&String> = empirical.keys().chain(theory.keys()).collect();
    keys.sort();
    keys.dedup();
    let listed: f64 = theory.iter().filter(|(k, _)| k.as_str() != OTHER).map(|(_, v)| v).sum();
    let theory_other = theory.get(OTHER).copied().unwrap_or((1.0 - listed).max(0.0));
    let mut sum = 0.0;
    let mut saw_other = false;
    for k in keys {
        let e = empirical.get(k).copied().unwrap_or(0.0);
        let t = if k == OTHER {
            saw_other = true;
            theory_other
        } else {
            theory.get(k).copied().unwrap_or(0.0)
        };
        sum += (e - t).abs();
    }
    if !saw_other {
        sum += theory_other;
    }
    (sum / 2.0).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn tv_examples() {
        let a = map(&[("A", 0.6), ("B", 0.4)]);
        let b = map(&[("A", 0.5), ("B", 0.5)]);
        assert!((total_variation(&a, &b) - 0.1).abs() < 1e-12);
        assert_eq!(total_variation(&a, &a), 0.0);
        assert_eq!(total_variation(&map(&[("A", 1.0)]), &map(&[("B", 1.0)])), 1.0);
        // Unlisted theory mass counts against the empirical side.
        assert!((total_variation(&map(&[("A", 1.0)]), &map(&[("A", 0.8)])) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn wilson_interval() {
        let ci = wilson(50, 100, Z95);
        assert!((ci.low - 0.4038).abs() < 1e-3 && (ci.high - 0.5962).abs() < 1e-3);
        for (s, n) in [(0, 1), (1, 1), (0, 4000), (3, 7), (4000, 4000)] {
            let ci = wilson(s, n, Z99);
            let p = s as f64 / n as f64;
            assert!(ci.contains(p) && ci.low >= 0.0 && ci.high <= 1.0);
        }
    }

    #[test]
    fn means() {
        let m = mean_estimate(&[1.0, 1.0, 1.0]);
        assert_eq!((m.mean, m.std_error), (1.0, 0.0));
        let m = mean_estimate(&[0.0, 2.0]);
        assert_eq!(m.mean, 1.0);
        assert!((m.std_dev - 2f64.sqrt()).abs() < 1e-12);
        assert!(m.ci95.contains(m.mean));
    }
}
