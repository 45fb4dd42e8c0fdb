//! Compensated floating-point accumulation.
//!
//! Pair statistics are sums of `O(n^2)` kernel terms folded into `O(n)`
//! weighted sums; plain accumulation loses enough precision at n in the
//! hundreds to break the 1e-12 agreement between the order-statistic and
//! brute-force routes. All summation in this crate goes through the
//! Neumaier-compensated accumulator below.

/// Neumaier variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
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
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of terms.
pub fn csum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = Accumulator::new();
    for t in terms {
        acc.add(t);
    }
    acc.total()
}

/// Compensated arithmetic mean; 0 on an empty slice is never returned
/// because all callers guarantee nonempty input.
pub fn cmean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    csum(values.iter().copied()) / values.len() as f64
}

/// Two-pass compensated sample variance with the n-1 denominator.
pub fn sample_variance(values: &[f64]) -> f64 {
    debug_assert!(values.len() >= 2);
    let m = cmean(values);
    let ss = csum(values.iter().map(|v| {
        let d = v - m;
        d * d
    }));
    ss / (values.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_beats_naive_on_adversarial_terms() {
        // 1 + 1e16 - 1e16 repeated: naive summation drops the ones.
        let terms: Vec<f64> = (0..1000).flat_map(|_| [1.0, 1e16, -1e16]).collect();
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 1000.0);
        assert_eq!(csum(terms.iter().copied()), 1000.0);
    }

    #[test]
    fn variance_of_constant_sample_is_zero() {
        assert_eq!(sample_variance(&[3.5; 64]), 0.0);
    }

    #[test]
    fn variance_matches_hand_value() {
        // Var of [1,2,3,4] with n-1 denominator is 5/3.
        let v = sample_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }
}
