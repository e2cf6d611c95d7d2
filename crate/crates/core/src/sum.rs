//! Compensated summation.

use std::ops::AddAssign;

use crate::scalar::Scalar;

/// Neumaier's improved Kahan accumulator.
///
/// The rounding error is bounded independently of the number of terms
/// (up to the condition number of the sum).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> NeumaierSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> AddAssign<T> for NeumaierSum<T> {
    #[inline]
    fn add_assign(&mut self, x: T) {
        self.add(x);
    }
}

impl<T: Scalar> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of a slice.
pub fn sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().collect::<NeumaierSum<T>>().value()
}

const BLOCK: usize = 256;

/// Blocked dot product: plain four-way accumulation inside fixed blocks,
/// compensated accumulation across blocks. The reduction order depends only
/// on the length, so results are reproducible.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = NeumaierSum::new();
    for (ca, cb) in a.chunks(BLOCK).zip(b.chunks(BLOCK)) {
        let mut s = [T::zero(); 4];
        let mut qa = ca.chunks_exact(4);
        let mut qb = cb.chunks_exact(4);
        for (x, y) in (&mut qa).zip(&mut qb) {
            s[0] += x[0] * y[0];
            s[1] += x[1] * y[1];
            s[2] += x[2] * y[2];
            s[3] += x[3] * y[3];
        }
        for (x, y) in qa.remainder().iter().zip(qb.remainder()) {
            s[0] += *x * *y;
        }
        acc.add((s[0] + s[1]) + (s[2] + s[3]));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        assert_eq!(sum(&xs), 2.0);
    }

    #[test]
    fn harmonic_sum_matches_reference() {
        // H_{10^6} = ln(10^6) + gamma + 1/(2n) - 1/(12n^2) + ...
        let n = 1_000_000usize;
        let xs: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let h = (n as f64).ln() + 0.577_215_664_901_532_9 + 0.5 / n as f64
            - 1.0 / (12.0 * (n as f64).powi(2));
        assert!((sum(&xs) - h).abs() < 1e-13);
    }

    #[test]
    fn dot_handles_remainders() {
        for len in [0usize, 1, 3, 4, 5, 255, 256, 257, 1031] {
            let a: Vec<f64> = (0..len).map(|i| 1.0 + i as f64).collect();
            let b: Vec<f64> = (0..len).map(|i| 1.0 / (1.0 + i as f64)).collect();
            assert!((dot(&a, &b) - len as f64).abs() < 1e-12, "len {len}");
        }
    }
}
