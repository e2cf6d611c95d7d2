//! Closed-form integrals and tail bounds for power and geometric series.

use crate::scalar::{c, cn, Scalar};
use crate::sum::NeumaierSum;

/// `∫_a^b x^e dx` for `0 < a <= b`, stable when `e` is close to `−1`.
pub fn power_integral<T: Scalar>(a: T, b: T, e: T) -> T {
    if b <= a {
        return T::zero();
    }
    if b.is_infinite() {
        return power_integral_to_infinity(a, e);
    }
    let e1 = e + T::one();
    let log_ratio = (b / a).ln();
    if e1 == T::zero() {
        return log_ratio;
    }
    let scaled = e1 * log_ratio;
    if scaled > c(700.0) {
        // Avoid overflowing the intermediate; the a-term is negligible.
        return (e1 * b.ln()).exp() / e1;
    }
    a.powf(e1) * scaled.exp_m1() / e1
}

/// `ln ∫_a^b x^e dx` for `0 < a < b < ∞`, free of overflow and underflow
/// in the intermediate powers.
pub fn ln_power_integral<T: Scalar>(a: T, b: T, e: T) -> T {
    if b <= a {
        return T::neg_infinity();
    }
    let e1 = e + T::one();
    let log_ratio = (b / a).ln();
    if e1 == T::zero() {
        return log_ratio.ln();
    }
    let scaled = e1 * log_ratio;
    // (b/a)^(e1) − 1 over e1 is positive for either sign of e1.
    let factor = if scaled > c(700.0) { scaled - (e1.abs()).ln() } else { (scaled.exp_m1() / e1).ln() };
    e1 * a.ln() + factor
}

/// `∫_a^∞ x^e dx`, `+∞` unless `e < −1`.
pub fn power_integral_to_infinity<T: Scalar>(a: T, e: T) -> T {
    let e1 = e + T::one();
    if e1 >= T::zero() {
        return T::infinity();
    }
    a.powf(e1) / (-e1)
}

/// Bracket `[lo, hi]` for `Σ_{n >= start} n^e` with `e < −1`, `start >= 1`.
///
/// Uses the integral test for a decreasing summand.
pub fn power_tail_bracket<T: Scalar>(start: usize, e: T) -> (T, T) {
    let s = cn::<T>(start);
    let lo = power_integral_to_infinity(s, e);
    let hi = s.powf(e) + lo;
    (lo, hi)
}

/// Upper bound for `Σ_{n >= s} n^e r^n` with `0 <= r < 1`, `s >= 1`.
///
/// The ratio of consecutive terms is at most `r ((s+1)/s)^max(e,0)`; the
/// bound is `+∞` when that ratio is not below one.
pub fn geometric_power_tail<T: Scalar>(s: usize, e: T, r: T) -> T {
    if r == T::zero() {
        return T::zero();
    }
    let sf = cn::<T>(s);
    let q = r * ((sf + T::one()) / sf).powf(e.max(T::zero()));
    if q >= T::one() {
        return T::infinity();
    }
    let first = (e * sf.ln() + sf * r.ln()).exp();
    first / (T::one() - q)
}

/// `Σ_{n=1}^{m} n^e`, summed directly up to a cutoff and by
/// Euler–Maclaurin (three correction terms) beyond it.
pub fn power_partial_sum<T: Scalar>(e: T, m: u64) -> T {
    const DIRECT: u64 = 100_000;
    let direct_end = m.min(DIRECT);
    let mut acc = NeumaierSum::new();
    for n in 1..=direct_end {
        acc.add(c::<T>(n as f64).powf(e));
    }
    if m <= DIRECT {
        return acc.value();
    }
    // Σ_{n=a}^{b} f(n) = ∫_a^b f + (f(a)+f(b))/2 + Σ_k B_2k/(2k)! (f^(2k-1)(b) − f^(2k-1)(a)).
    let a = c::<T>((DIRECT + 1) as f64);
    let b = c::<T>(m as f64);
    let f = |x: T| x.powf(e);
    // k-th derivative of x^e is e(e-1)...(e-k+1) x^(e-k).
    let deriv = |x: T, k: usize| {
        let mut coef = T::one();
        for j in 0..k {
            coef *= e - cn::<T>(j);
        }
        coef * x.powf(e - cn::<T>(k))
    };
    let mut tail = NeumaierSum::new();
    tail.add(power_integral(a, b, e));
    tail.add(c::<T>(0.5) * (f(a) + f(b)));
    let bern = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0];
    for (k, &w) in bern.iter().enumerate() {
        let order = 2 * k + 1;
        tail.add(c::<T>(w) * (deriv(b, order) - deriv(a, order)));
    }
    acc.add(tail.value());
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_power_integral_matches_direct_and_survives_extremes() {
        for &(a, b, e) in &[(2.0f64, 3.0, -2.5), (10.0, 11.0, 0.5), (5.0, 9.0, -1.0), (1.0, 1e3, 1.3)] {
            assert!((ln_power_integral(a, b, e) - power_integral(a, b, e).ln()).abs() < 1e-12);
        }
        let v: f64 = ln_power_integral(1e279, 1.2e279, -2.5);
        assert!(v.is_finite() && v < -900.0);
        let big: f64 = ln_power_integral(1.0, 1e300, 3.0);
        assert!((big - (1200.0 * 10f64.ln() - 4f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn power_integral_matches_closed_form() {
        assert!((power_integral(1.0f64, 2.0, 1.0) - 1.5).abs() < 1e-15);
        assert!((power_integral(1.0f64, 10.0, -1.0) - 10f64.ln()).abs() < 1e-15);
        let near = power_integral(1.0f64, 1e6, -1.0 - 1e-12);
        assert!((near - 1e6f64.ln()).abs() < 1e-9);
        assert!((power_integral_to_infinity(2.0f64, -3.0) - 0.125).abs() < 1e-16);
        assert!(power_integral_to_infinity(2.0f64, -1.0).is_infinite());
    }

    #[test]
    fn zeta_tail_bracket() {
        // Σ_{n>=1} n^-2 = π²/6.
        let head: f64 = (1..10).map(|n| 1.0 / (n * n) as f64).sum();
        let (lo, hi) = power_tail_bracket(10, -2.0f64);
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(head + lo <= z2 && z2 <= head + hi);
    }

    #[test]
    fn geometric_tail_bounds_sum() {
        let (s, e, r) = (20usize, 1.5f64, 0.8f64);
        let exact: f64 = (s..5000).map(|n| (n as f64).powf(e) * r.powi(n as i32)).sum();
        let bound = geometric_power_tail(s, e, r);
        assert!(exact <= bound && bound < 5.0 * exact);
        assert!(geometric_power_tail(1, 5.0f64, 0.99).is_infinite());
    }

    #[test]
    fn euler_maclaurin_agrees_with_direct_sum() {
        let m = 300_000u64;
        let e = -0.37f64;
        let direct: f64 = {
            let mut s = NeumaierSum::new();
            for n in 1..=m {
                s.add((n as f64).powf(e));
            }
            s.value()
        };
        let em = power_partial_sum(e, m);
        assert!(((em - direct) / direct).abs() < 1e-13);
    }
}
