//! Small statistical helpers shared by the Monte Carlo drivers.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// A proportion estimate with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z95);
        let estimate = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        Self { successes, trials, estimate, ci_lo, ci_hi }
    }

    /// Binomial standard error of the estimate.
    pub fn std_err(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for `k` successes in `n` trials. Returns `(0, 1)` for `n = 0`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 { f64::NAN } else { self.mean }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 { f64::NAN } else { self.m2 / (self.count - 1) as f64 }
    }

    pub fn std_err(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 8 of 10: standard textbook interval (0.4902, 0.9433).
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!((lo - 0.4901625).abs() < 1e-6, "{lo}");
        assert!((hi - 0.9433178).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.08);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn moments_match_direct() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let m: Moments = xs.iter().copied().collect();
        assert_eq!(m.count(), 4);
        assert!((m.mean() - 3.5).abs() < 1e-15);
        assert!((m.variance() - 7.0).abs() < 1e-12);
    }
}
