//! Point estimates with normal-approximation confidence intervals.

use serde::{Deserialize, Serialize};

pub const Z95: f64 = 1.959_963_984_540_054;

/// Monte Carlo estimate. `ci95` is always `mean ± 1.96·stderr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub ci95: (f64, f64),
}

impl EstimateWithCI {
    pub fn new(mean: f64, stderr: f64, n_samples: u64) -> Self {
        let stderr = if stderr.is_finite() { stderr.max(0.0) } else { stderr };
        EstimateWithCI {
            mean,
            stderr,
            n_samples: n_samples.max(1),
            ci95: (mean - Z95 * stderr, mean + Z95 * stderr),
        }
    }

    /// Exact value with no sampling error.
    pub fn exact(value: f64) -> Self {
        EstimateWithCI::new(value, 0.0, 1)
    }

    /// Sample mean and standard error. A single sample has zero stderr.
    pub fn from_samples(xs: &[f64]) -> Option<Self> {
        let mut acc = Welford::default();
        xs.iter().for_each(|&x| acc.push(x));
        acc.estimate()
    }

    /// Binomial proportion.
    pub fn binomial(successes: u64, trials: u64) -> Option<Self> {
        if trials == 0 {
            return None;
        }
        let p = successes as f64 / trials as f64;
        Some(EstimateWithCI::new(p, (p * (1.0 - p) / trials as f64).sqrt(), trials))
    }

    /// Ratio of sums `Σa / Σb` over paired replicates, with a delta-method
    /// standard error from replicate-level residuals.
    pub fn ratio(num: &[f64], den: &[f64]) -> Option<Self> {
        assert_eq!(num.len(), den.len());
        let t = num.len();
        let sa: f64 = num.iter().sum();
        let sb: f64 = den.iter().sum();
        if t == 0 || sb == 0.0 {
            return None;
        }
        let r = sa / sb;
        if t == 1 {
            return Some(EstimateWithCI::new(r, 0.0, 1));
        }
        let mean_b = sb / t as f64;
        let ss: f64 = num.iter().zip(den).map(|(a, b)| (a - r * b).powi(2)).sum();
        let se = (ss / (t as f64 * (t as f64 - 1.0))).sqrt() / mean_b;
        Some(EstimateWithCI::new(r, se, t as u64))
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci95.0 <= value && value <= self.ci95.1
    }

    /// `|mean − value| ≤ k·stderr`.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }

    pub fn relative_error(&self, value: f64) -> f64 {
        (self.mean - value).abs() / value.abs()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EstimateWithCI::new(self.mean * factor, self.stderr * factor.abs(), self.n_samples)
    }
}

/// Streaming mean/variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Option<EstimateWithCI> {
        (self.n > 0).then(|| EstimateWithCI::new(self.mean, (self.variance() / self.n as f64).sqrt(), self.n))
    }
}

/// Ordinary least squares fit `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
}

/// Weighted least squares; `weights` default to 1. With exactly two points
/// the slope error is zero.
pub fn linear_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let w: Vec<f64> = weights.map(|w| w.to_vec()).unwrap_or_else(|| vec![1.0; n]);
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    let syy: f64 = y.iter().zip(&w).map(|(c, b)| b * (c - my).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((a, c), b)| b * (c - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = if n > 2 { (sse / (n as f64 - 2.0) / sxx).sqrt() } else { 0.0 };
    Some(LinearFit { slope, intercept, r_squared, slope_stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_is_symmetric() {
        let e = EstimateWithCI::new(2.0, 0.5, 10);
        assert!((e.ci95.0 - (2.0 - Z95 * 0.5)).abs() < 1e-15);
        assert!((e.ci95.1 - (2.0 + Z95 * 0.5)).abs() < 1e-15);
        assert!(e.contains(2.5) && !e.contains(3.5));
    }

    #[test]
    fn sample_estimates() {
        assert_eq!(EstimateWithCI::from_samples(&[]), None);
        let one = EstimateWithCI::from_samples(&[0.1]).unwrap();
        assert_eq!((one.mean, one.stderr, one.n_samples), (0.1, 0.0, 1));
        let e = EstimateWithCI::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((e.mean - 2.5).abs() < 1e-15);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ratio_of_proportional_series_is_exact() {
        let b = [3.0, 5.0, 7.0, 11.0];
        let a: Vec<f64> = b.iter().map(|x| 0.25 * x).collect();
        let r = EstimateWithCI::ratio(&a, &b).unwrap();
        assert!((r.mean - 0.25).abs() < 1e-15);
        assert!(r.stderr < 1e-15);
    }

    #[test]
    fn fit_planted_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v).collect();
        let f = linear_fit(&x, &y, None).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-12);
    }

    #[test]
    fn binomial_ci_covers_truth() {
        // Coverage of the 95% interval over 1000 synthetic Bernoulli streams.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let p = 0.3;
        let covered = (0..1000)
            .filter(|_| {
                let k = (0..2000).filter(|_| rng.random_bool(p)).count() as u64;
                EstimateWithCI::binomial(k, 2000).unwrap().contains(p)
            })
            .count();
        assert!(covered >= 930, "coverage {covered}/1000");
    }
}
