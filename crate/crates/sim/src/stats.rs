//! Interval estimates and the two-sample chi-square test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
/// Returns `(0, 1)` when `n` is zero.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Lower bin edges (inclusive); the last bin is open-ended.
    pub bin_edges: Vec<u64>,
    pub observed: [Vec<u64>; 2],
    /// Fewer bins than requested because tied values collapsed edges.
    pub widened: bool,
}

/// Two-sample chi-square homogeneity test on integer observations, binned at
/// quantiles of the pooled sample into at most `max_bins` bins.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], max_bins: usize) -> ChiSquareResult {
    let mut pooled: Vec<u64> = a.iter().chain(b).copied().collect();
    pooled.sort_unstable();
    let requested = max_bins.max(2);

    let mut edges: Vec<u64> = (0..requested)
        .filter_map(|i| pooled.get(i * pooled.len() / requested).copied())
        .collect();
    edges.dedup();
    let widened = edges.len() < requested;

    let bin_of = |x: u64| edges.partition_point(|&e| e <= x).saturating_sub(1);
    let mut observed = [vec![0u64; edges.len()], vec![0u64; edges.len()]];
    for &x in a {
        observed[0][bin_of(x)] += 1;
    }
    for &x in b {
        observed[1][bin_of(x)] += 1;
    }

    if edges.len() < 2 {
        return ChiSquareResult { statistic: 0.0, dof: 0, p_value: 1.0, bin_edges: edges, observed, widened };
    }

    let totals = [a.len() as f64, b.len() as f64];
    let grand = totals[0] + totals[1];
    let mut statistic = 0.0;
    for j in 0..edges.len() {
        let column = (observed[0][j] + observed[1][j]) as f64;
        for (row, &row_total) in totals.iter().enumerate() {
            let expected = row_total * column / grand;
            if expected > 0.0 {
                statistic += (observed[row][j] as f64 - expected).powi(2) / expected;
            }
        }
    }
    let dof = edges.len() - 1;
    let p_value = ChiSquared::new(dof as f64).expect("dof >= 1").sf(statistic);
    ChiSquareResult { statistic, dof, p_value, bin_edges: edges, observed, widened }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 10 of 100: textbook interval (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.05522914).abs() < 1e-6, "{lo}");
        assert!((hi - 0.17436566).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert!(lo < 1.0 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_hand_computed() {
        // two bins, a = [0,0,0,1], b = [0,1,1,1]: O = [[3,1],[1,3]], E = 2 everywhere
        let r = chi_square_two_sample(&[0, 0, 0, 1], &[0, 1, 1, 1], 2);
        assert_eq!(r.observed, [vec![3, 1], vec![1, 3]]);
        assert!((r.statistic - 2.0).abs() < 1e-12);
        assert_eq!(r.dof, 1);
        // P(chi2_1 > 2) = 0.157299
        assert!((r.p_value - 0.157_299_207).abs() < 1e-6);
    }

    #[test]
    fn degenerate_sample_widens_to_one_bin() {
        let r = chi_square_two_sample(&[5; 40], &[5; 40], 5);
        assert!(r.widened);
        assert_eq!(r.dof, 0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn separated_samples_are_detected() {
        let a: Vec<u64> = (0..100).map(|i| 100 + i % 10).collect();
        let b: Vec<u64> = (0..100).map(|i| 50 + i % 10).collect();
        assert!(chi_square_two_sample(&a, &b, 5).p_value < 1e-10);
    }
}
