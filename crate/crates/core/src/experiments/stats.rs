//! Streaming moments with an order-fixed merge.

/// Count, mean and centered second moment (Welford / Chan et al.).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    /// Sample variance (n - 1 denominator); zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.std() / (self.count as f64).sqrt()
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            mean: self.mean,
            std: self.std(),
            std_error: self.std_error(),
            count: self.count,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
    pub count: u64,
}

impl Summary {
    /// |mean - target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if self.std_error == 0.0 {
            if diff <= 1e-9 * target.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Two-sided standard-normal quantile for a confidence level in (0, 1).
pub fn normal_quantile(confidence: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}
