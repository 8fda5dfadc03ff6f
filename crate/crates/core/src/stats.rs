//! Batch-means accumulation for correlated time series.

use serde::{Deserialize, Serialize};

/// Running sums over one batch of a time series with several observables.
#[derive(Debug, Clone)]
pub(crate) struct BatchAccumulator<const K: usize> {
    batch_len: u64,
    count: u64,
    current: [f64; K],
    means: Vec<[f64; K]>,
    // raw second moments for the per-sample variance
    sum: [f64; K],
    sum_sq: [f64; K],
    samples: u64,
}

impl<const K: usize> BatchAccumulator<K> {
    pub(crate) fn new(batch_len: u64) -> Self {
        assert!(batch_len > 0);
        BatchAccumulator {
            batch_len,
            count: 0,
            current: [0.0; K],
            means: Vec::new(),
            sum: [0.0; K],
            sum_sq: [0.0; K],
            samples: 0,
        }
    }

    #[inline]
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn push(&mut self, x: [f64; K]) {
        for k in 0..K {
            self.current[k] += x[k];
        }
        self.count += 1;
        if self.count == self.batch_len {
            let n = self.batch_len as f64;
            let mut mean = [0.0; K];
            for k in 0..K {
                mean[k] = self.current[k] / n;
                self.sum[k] += self.current[k];
                self.current[k] = 0.0;
            }
            self.means.push(mean);
            self.count = 0;
        }
        for k in 0..K {
            self.sum_sq[k] += x[k] * x[k];
        }
        self.samples += 1;
    }

    /// Merge another accumulator with the same batch length (replica averaging).
    pub(crate) fn merge(&mut self, other: &Self) {
        debug_assert_eq!(self.batch_len, other.batch_len);
        self.means.extend_from_slice(&other.means);
        for k in 0..K {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self.samples += other.samples;
    }

    pub(crate) fn summary(&self, k: usize) -> BatchSummary {
        let nb = self.means.len();
        let mean = self.means.iter().map(|m| m[k]).sum::<f64>() / nb as f64;
        let var_batch = self
            .means
            .iter()
            .map(|m| (m[k] - mean).powi(2))
            .sum::<f64>()
            / (nb as f64 - 1.0);
        let stderr = (var_batch / nb as f64).sqrt();
        // only completed batches enter the mean; the per-sample variance uses all samples
        let n = self.samples as f64;
        let raw_mean = (self.sum[k] + self.current[k]) / n;
        let sample_var = (self.sum_sq[k] / n - raw_mean * raw_mean).max(0.0);
        BatchSummary {
            mean,
            stderr,
            n_batches: nb,
            n_effective: if stderr > 0.0 {
                sample_var / (stderr * stderr)
            } else {
                n
            },
        }
    }
}

/// Mean, batch-means standard error and effective sample count of one observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub mean: f64,
    pub stderr: f64,
    pub n_batches: usize,
    pub n_effective: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn iid_samples_give_sigma_over_root_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut acc = BatchAccumulator::<1>::new(1000);
        let n = 200_000;
        for _ in 0..n {
            let x: f64 = StandardNormal.sample(&mut rng);
            acc.push([x]);
        }
        let s = acc.summary(0);
        assert_eq!(s.n_batches, 200);
        let expected = 1.0 / (n as f64).sqrt();
        assert!(
            (s.stderr / expected - 1.0).abs() < 0.2,
            "{} vs {}",
            s.stderr,
            expected
        );
        assert!(s.mean.abs() < 4.0 * expected);
        assert!((s.n_effective / n as f64 - 1.0).abs() < 0.5);
    }

    #[test]
    fn correlated_samples_inflate_stderr() {
        // AR(1) with phi = 0.9: long-run variance (1+phi)/(1-phi) = 19 times the iid value
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi: f64 = 0.9;
        let mut x = 0.0;
        let mut acc = BatchAccumulator::<1>::new(4000);
        let n = 400_000;
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            x = phi * x + (1.0 - phi * phi).sqrt() * z;
            acc.push([x]);
        }
        let s = acc.summary(0);
        let expected = (19.0 / n as f64).sqrt();
        assert!(
            (s.stderr / expected - 1.0).abs() < 0.25,
            "{} vs {}",
            s.stderr,
            expected
        );
        assert!(s.n_effective < n as f64 / 10.0);
    }

    #[test]
    fn merge_concatenates_batches() {
        let mut a = BatchAccumulator::<2>::new(2);
        let mut b = BatchAccumulator::<2>::new(2);
        for v in [1.0, 2.0, 3.0, 4.0] {
            a.push([v, -v]);
            b.push([v + 10.0, 0.0]);
        }
        a.merge(&b);
        let s = a.summary(0);
        assert_eq!(s.n_batches, 4);
        assert_eq!(s.mean, (1.5 + 3.5 + 11.5 + 13.5) / 4.0);
    }
}
