//! Compensated (Neumaier) summation.
//!
//! Ensemble reductions must not depend on summation order beyond 1e-12
//! relative, so every accumulation over paths or trials goes through this
//! accumulator instead of a bare `+=` loop.

/// Running Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Neumaier::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        let s = compensated_sum([1e16, 1.0, -1e16]);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn order_independent_within_tolerance() {
        // Pseudo-random magnitudes spanning ten orders; forward vs reverse
        // order must agree to 1e-12 relative.
        let mut vals = Vec::new();
        let mut x = 0.5f64;
        for i in 0..10_000 {
            x = (x * 48271.0) % 1.0 + 1e-6;
            vals.push(x * 10f64.powi((i % 10) - 5));
        }
        let fwd = compensated_sum(vals.iter().copied());
        let rev = compensated_sum(vals.iter().rev().copied());
        assert!(((fwd - rev) / fwd).abs() < 1e-12);
    }
}
