//! Pointwise violation statistics.

/// Max/mean/count of an identity's pointwise violation over a sample set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualSummary {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl ResidualSummary {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut acc = ResidualAccumulator::default();
        for v in values {
            acc.push(v);
        }
        acc.finish()
    }

    pub fn merge(&self, other: &ResidualSummary) -> ResidualSummary {
        let mut acc = ResidualAccumulator::default();
        acc.push_summary(self);
        acc.push_summary(other);
        acc.finish()
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max <= tolerance
    }
}

/// Streaming builder for [`ResidualSummary`]. NaN inputs poison the maximum.
#[derive(Clone, Copy, Debug, Default)]
pub struct ResidualAccumulator {
    max: f64,
    sum: f64,
    count: usize,
}

impl ResidualAccumulator {
    pub fn push(&mut self, v: f64) {
        let v = libm::fabs(v);
        if !self.max.is_nan() && (v.is_nan() || v > self.max) {
            self.max = v;
        }
        self.sum += v;
        self.count += 1;
    }

    pub fn push_summary(&mut self, s: &ResidualSummary) {
        if s.count == 0 {
            return;
        }
        if !self.max.is_nan() && (s.max.is_nan() || s.max > self.max) {
            self.max = s.max;
        }
        self.sum += s.mean * s.count as f64;
        self.count += s.count;
    }

    pub fn finish(&self) -> ResidualSummary {
        ResidualSummary {
            max: self.max,
            mean: if self.count == 0 {
                0.0
            } else {
                self.sum / self.count as f64
            },
            count: self.count,
        }
    }
}
