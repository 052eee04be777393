//! Compensated floating-point accumulation.
//!
//! The empirical sums in this crate run over up to 10^9 terms; naive `f64`
//! accumulation loses about three digits at that length, so every long
//! reduction goes through a Kahan accumulator.

/// Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Fold another accumulator in (used when merging per-thread partials).
    #[inline]
    pub fn merge(&mut self, other: Kahan) {
        self.add(other.sum);
        self.add(-other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_beats_naive() {
        // 10^7 copies of a value with a long binary expansion
        let v = 0.1_f64;
        let n = 10_000_000;
        let mut naive = 0.0;
        let mut kahan = Kahan::new();
        for _ in 0..n {
            naive += v;
            kahan.add(v);
        }
        let exact = v * n as f64;
        assert!((kahan.value() - exact).abs() <= (naive - exact).abs());
        assert!((kahan.value() - exact).abs() < 1e-6);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let whole = Kahan::sum_iter(xs.iter().copied());
        let mut left = Kahan::new();
        let mut right = Kahan::new();
        for &x in &xs[..500] {
            left.add(x);
        }
        for &x in &xs[500..] {
            right.add(x);
        }
        left.merge(right);
        assert!((left.value() - whole).abs() < 1e-12);
    }
}
