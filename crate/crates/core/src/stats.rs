//! Small accumulators with deterministic, order-fixed merging.

use serde::Serialize;

/// Success counts for a Bernoulli observable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub trials: u64,
    pub successes: u64,
}

impl Counts {
    pub fn record(&mut self, hit: bool) {
        self.trials += 1;
        self.successes += hit as u64;
    }

    pub fn merge(&mut self, other: &Counts) {
        self.trials += other.trials;
        self.successes += other.successes;
    }

    pub fn stats(&self) -> CrossingStats {
        CrossingStats::from_counts(self.trials, self.successes)
    }
}

/// A Bernoulli estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingStats {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub standard_error: f64,
}

impl CrossingStats {
    pub fn from_counts(trials: u64, successes: u64) -> Self {
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let standard_error = if trials == 0 { 0.0 } else { (estimate * (1.0 - estimate) / trials as f64).sqrt() };
        CrossingStats { trials, successes, estimate, standard_error }
    }
}

/// Running first and second moments of a real observable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// An estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    pub fn new(value: f64, standard_error: f64) -> Self {
        Estimate { value, standard_error }
    }

    pub fn from_moments(m: &Moments) -> Self {
        Estimate::new(m.mean(), m.standard_error())
    }

    /// `|value - target| <= k * standard_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.standard_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_se() {
        let mut c = Counts::default();
        for i in 0..10 {
            c.record(i % 4 == 0);
        }
        let s = c.stats();
        assert_eq!((s.trials, s.successes), (10, 3));
        assert!((s.estimate - 0.3).abs() < 1e-15);
        assert!((s.standard_error - (0.3f64 * 0.7 / 10.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn moments_match_direct_formula() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        let mean = 15.0 / 4.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        assert!((m.mean() - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-12);
    }
}
