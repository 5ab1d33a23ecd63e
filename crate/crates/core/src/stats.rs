//! Error estimation for correlated Monte Carlo series.

use crate::{Error, Result};

/// Blocking levels with fewer blocks than this are too noisy to use.
pub const MIN_BLOCKS: usize = 32;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by `n`), two-pass.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockLevel {
    pub block_size: usize,
    pub blocks: usize,
    pub standard_error: f64,
    /// Statistical uncertainty of `standard_error` itself.
    pub error_of_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Blocking {
    pub mean: f64,
    pub levels: Vec<BlockLevel>,
    /// Largest standard error over levels with at least [`MIN_BLOCKS`] blocks.
    pub standard_error: f64,
    /// Whether the last two usable levels agree within their errors.
    pub plateau: bool,
}

/// Flyvbjerg-Petersen blocking: average neighbouring pairs repeatedly and
/// track the naive standard error of the mean at each level. The estimate
/// grows with block size until blocks are longer than the correlation time
/// and then levels off.
pub fn blocking(series: &[f64]) -> Result<Blocking> {
    if series.len() < 2 * MIN_BLOCKS {
        return Err(Error::SeriesTooShort { len: series.len(), min: 2 * MIN_BLOCKS });
    }
    let mean = mean(series);
    let mut data = series.to_vec();
    let mut levels = Vec::new();
    let mut block_size = 1;
    while data.len() >= MIN_BLOCKS {
        let n = data.len() as f64;
        let var = variance(&data);
        let se = (var / (n - 1.0)).sqrt();
        levels.push(BlockLevel {
            block_size,
            blocks: data.len(),
            standard_error: se,
            error_of_error: se / (2.0 * (n - 1.0)).sqrt(),
        });
        data = data.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        block_size *= 2;
    }
    let standard_error = levels.iter().map(|l| l.standard_error).fold(0.0, f64::max);
    let plateau = match levels.as_slice() {
        [.., a, b] => (a.standard_error - b.standard_error).abs() <= a.error_of_error + b.error_of_error,
        _ => false,
    };
    Ok(Blocking { mean, levels, standard_error, plateau })
}

/// Delete-one-block jackknife of a statistic `f` of the whole series.
/// Returns `(f(series), standard_error)`.
pub fn block_jackknife(series: &[f64], blocks: usize, f: impl Fn(&[f64]) -> f64) -> Result<(f64, f64)> {
    let blocks = blocks.max(2);
    if series.len() < blocks {
        return Err(Error::SeriesTooShort { len: series.len(), min: blocks });
    }
    let full = f(series);
    let len = series.len() / blocks;
    let used = &series[..len * blocks];
    let mut buf = Vec::with_capacity(used.len() - len);
    let estimates: Vec<f64> = (0..blocks)
        .map(|b| {
            buf.clear();
            buf.extend_from_slice(&used[..b * len]);
            buf.extend_from_slice(&used[(b + 1) * len..]);
            f(&buf)
        })
        .collect();
    let m = mean(&estimates);
    let k = blocks as f64;
    let var = (k - 1.0) / k * estimates.iter().map(|e| (e - m) * (e - m)).sum::<f64>();
    Ok((full, var.sqrt()))
}

/// Same as [`block_jackknife`] for statistics of several aligned series.
pub fn block_jackknife_multi(series: &[&[f64]], blocks: usize, f: impl Fn(&[Vec<f64>]) -> f64) -> Result<(f64, f64)> {
    let blocks = blocks.max(2);
    let n = series.first().map_or(0, |s| s.len());
    if n < blocks || series.iter().any(|s| s.len() != n) {
        return Err(Error::SeriesTooShort { len: n, min: blocks });
    }
    let full = f(&series.iter().map(|s| s.to_vec()).collect::<Vec<_>>());
    let len = n / blocks;
    let estimates: Vec<f64> = (0..blocks)
        .map(|b| {
            let parts: Vec<Vec<f64>> = series
                .iter()
                .map(|s| s[..b * len].iter().chain(&s[(b + 1) * len..len * blocks]).copied().collect())
                .collect();
            f(&parts)
        })
        .collect();
    let m = mean(&estimates);
    let k = blocks as f64;
    let var = (k - 1.0) / k * estimates.iter().map(|e| (e - m) * (e - m)).sum::<f64>();
    Ok((full, var.sqrt()))
}

/// Equal-width histogram normalised as a probability density.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Self { lo, hi, counts: vec![0; bins.max(1)], total: 0 }
    }

    pub fn from_samples(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut h = Self::new(lo, hi, bins);
        for &s in samples {
            h.add(s);
        }
        h
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    /// Values outside `[lo, hi]` are clamped into the edge bins.
    pub fn add(&mut self, x: f64) {
        let k = ((x - self.lo) / self.width()).floor();
        let k = k.clamp(0.0, (self.bins() - 1) as f64) as usize;
        self.counts[k] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|k| self.lo + (k as f64 + 0.5) * self.width()).collect()
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins()).map(|k| self.lo + k as f64 * self.width()).collect()
    }

    pub fn density(&self) -> Vec<f64> {
        let norm = self.total as f64 * self.width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Empirical CDF at the right edge of each bin.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / self.total as f64
            })
            .collect()
    }
}

/// Freedman-Diaconis bin count for `samples` over `[lo, hi]`.
pub fn freedman_diaconis_bins(samples: &[f64], lo: f64, hi: f64) -> usize {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let (i, f) = (pos.floor() as usize, pos.fract());
        sorted[i] + f * (sorted[(i + 1).min(sorted.len() - 1)] - sorted[i])
    };
    let iqr = q(0.75) - q(0.25);
    let width = 2.0 * iqr / (samples.len() as f64).cbrt();
    if !(width > 0.0) {
        return 1;
    }
    (((hi - lo) / width).ceil() as usize).clamp(1, 10_000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn blocking_recovers_white_noise_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..1 << 14).map(|_| rng.random::<f64>()).collect();
        let b = blocking(&xs).unwrap();
        let naive = (variance(&xs) / (xs.len() - 1) as f64).sqrt();
        assert!((b.levels[0].standard_error - naive).abs() < 1e-15);
        assert!(b.standard_error < 1.3 * naive);
    }

    #[test]
    fn blocking_sees_autocorrelation() {
        // AR(1) with rho = 0.9: integrated time (1 + rho) / (1 - rho) = 19
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..1 << 16)
            .map(|_| {
                x = 0.9 * x + rng.random::<f64>() - 0.5;
                x
            })
            .collect();
        let b = blocking(&xs).unwrap();
        let naive = b.levels[0].standard_error;
        let ratio = b.standard_error / naive;
        assert!(ratio > 19f64.sqrt() * 0.8 && ratio < 19f64.sqrt() * 1.4, "{ratio}");
        assert!(b.plateau);
    }

    #[test]
    fn blocking_needs_data() {
        assert!(blocking(&[1.0; 10]).is_err());
        let b = blocking(&[3.0; 100]).unwrap();
        assert_eq!(b.standard_error, 0.0);
    }

    #[test]
    fn jackknife_of_mean_matches_naive_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let (m, se) = block_jackknife(&xs, 100, mean).unwrap();
        assert!((m - mean(&xs)).abs() < 1e-15);
        let naive = (variance(&xs) / xs.len() as f64).sqrt();
        assert!((se / naive - 1.0).abs() < 0.2);
    }

    #[test]
    fn histogram_density_and_cdf() {
        let h = Histogram::from_samples(&[0.5, 1.5, 1.7, 3.9, 4.0], 0.0, 4.0, 4);
        assert_eq!(h.counts, vec![1, 2, 0, 2]);
        let d = h.density();
        assert!((d.iter().sum::<f64>() * h.width() - 1.0).abs() < 1e-15);
        assert_eq!(h.cdf().last().copied(), Some(1.0));
    }

    #[test]
    fn fd_bins_reasonable() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let bins = freedman_diaconis_bins(&xs, 0.0, 1.0);
        assert!((9..=11).contains(&bins), "{bins}");
        assert_eq!(freedman_diaconis_bins(&[2.0; 50], 0.0, 4.0), 1);
    }
}
