//! Weighted sequence spaces `ℓ^p_α` and the test-sequence families.

use crate::error::{Error, Result};
use crate::scalar::{c, cn, Scalar};
use crate::series::{geometric_power_tail, power_integral_to_infinity};
use crate::sum::NeumaierSum;

/// Longest sequence any generator will materialize.
pub const MAX_SEQ_LEN: usize = 1 << 27;

/// Exponents `(p, α, β)` of a source space `ℓ^p_α` and target `ℓ^p_β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams<T> {
    pub p: T,
    pub alpha: T,
    pub beta: T,
    pub q: T,
}

impl<T: Scalar> WeightParams<T> {
    /// Same weight on both sides.
    pub fn new(p: T, alpha: T) -> Result<Self> {
        Self::with_beta(p, alpha, alpha)
    }

    pub fn with_beta(p: T, alpha: T, beta: T) -> Result<Self> {
        if !(p > T::one() && p.is_finite()) {
            return Err(Error::construction("weights", format!("p must exceed 1, got {p}")));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::construction("weights", "alpha and beta must be finite"));
        }
        Ok(Self { p, alpha, beta, q: p / (p - T::one()) })
    }

    /// Whether `−1 < α, β < p − 1`.
    pub fn in_hypothesis_range(&self) -> bool {
        let lo = -T::one();
        let hi = self.p - T::one();
        self.alpha > lo && self.alpha < hi && self.beta > lo && self.beta < hi
    }

    pub fn check_hypothesis(&self) -> Result<()> {
        if self.in_hypothesis_range() {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "requires -1 < alpha, beta < p-1; got p={}, alpha={}, beta={}",
                self.p, self.alpha, self.beta
            )))
        }
    }

    /// `1 + (β − α)/p`, the Carleson / decay exponent linking the two spaces.
    pub fn carleson_exponent(&self) -> T {
        T::one() + (self.beta - self.alpha) / self.p
    }

    fn weight(&self, use_beta: bool) -> T {
        if use_beta {
            self.beta
        } else {
            self.alpha
        }
    }
}

/// Generator that produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T> {
    Epsilon { eps: T },
    B { b: T },
    Tau { tau: T, n_cutoff: usize },
    Custom,
}

impl<T: Scalar> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Epsilon { .. } => "epsilon_family",
            Family::B { .. } => "b_family",
            Family::Tau { .. } => "tau_family",
            Family::Custom => "custom",
        }
    }

    /// The family's defining parameter (ε, b or τ).
    pub fn parameter(&self) -> Option<T> {
        match self {
            Family::Epsilon { eps } => Some(*eps),
            Family::B { b } => Some(*b),
            Family::Tau { tau, .. } => Some(*tau),
            Family::Custom => None,
        }
    }
}

/// Continuation `a_n = amp · n^(−decay) · ratio^n` of a generated sequence
/// beyond its stored length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailProfile<T> {
    pub amp: T,
    pub decay: T,
    pub ratio: T,
}

impl<T: Scalar> TailProfile<T> {
    pub fn value(&self, n: usize) -> T {
        let nf = cn::<T>(n);
        if self.ratio == T::one() {
            self.amp * nf.powf(-self.decay)
        } else {
            self.amp * (nf * self.ratio.ln() - self.decay * nf.ln()).exp()
        }
    }
}

/// Nonnegative sequence `a_1..a_M` with generator metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq<T> {
    values: Vec<T>,
    family: Family<T>,
    tail: Option<TailProfile<T>>,
}

impl<T: Scalar> Seq<T> {
    /// Finite-support sequence; entries beyond the stored ones are zero.
    pub fn custom(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::construction("sequence", "needs at least one entry"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= T::zero())) {
            return Err(Error::construction("sequence", format!("entry {} is {v}; entries must be >= 0", i + 1)));
        }
        Ok(Self { values, family: Family::Custom, tail: None })
    }

    /// Unit vector `e_k` of length `len`.
    pub fn unit(k: usize, len: usize) -> Result<Self> {
        if k == 0 || k > len {
            return Err(Error::construction("sequence", format!("unit index {k} outside 1..={len}")));
        }
        let mut v = vec![T::zero(); len];
        v[k - 1] = T::one();
        Self::custom(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_n`, 1-based; zero or the tail continuation beyond the stored range.
    pub fn get(&self, n: usize) -> T {
        if n >= 1 && n <= self.values.len() {
            self.values[n - 1]
        } else {
            self.tail.map_or(T::zero(), |t| t.value(n))
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn family(&self) -> Family<T> {
        self.family
    }

    pub fn tail(&self) -> Option<TailProfile<T>> {
        self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero()) && self.tail.map_or(true, |t| t.amp == T::zero())
    }

    /// `λ a` for `λ >= 0`; generator metadata scales with it.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda.is_finite()) {
            return Err(Error::construction("sequence", format!("scale must be >= 0, got {lambda}")));
        }
        Ok(Self {
            values: self.values.iter().map(|&v| v * lambda).collect(),
            family: self.family,
            tail: self.tail.map(|t| TailProfile { amp: t.amp * lambda, ..t }),
        })
    }

    /// Entrywise sum of two finite-support sequences.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.tail.is_some() || other.tail.is_some() {
            return Err(Error::construction("sequence", "sums are defined for finite-support sequences only"));
        }
        let len = self.len().max(other.len());
        Self::custom((1..=len).map(|n| self.get(n) + other.get(n)).collect())
    }
}

/// `Σ_{n<=M} n^w a_n^p` with compensated summation.
pub fn weighted_norm_pow<T: Scalar>(a: &Seq<T>, w: &WeightParams<T>, use_beta: bool) -> T {
    let wexp = w.weight(use_beta);
    let mut acc = NeumaierSum::new();
    for (i, &v) in a.values().iter().enumerate() {
        if v != T::zero() {
            acc.add(cn::<T>(i + 1).powf(wexp) * v.powf(w.p));
        }
    }
    acc.value()
}

/// `(Σ_{n<=M} n^w a_n^p)^(1/p)` with `w = β` if `use_beta`, else `α`.
pub fn weighted_norm<T: Scalar>(a: &Seq<T>, w: &WeightParams<T>, use_beta: bool) -> T {
    weighted_norm_pow(a, w, use_beta).powf(w.p.recip())
}

/// Bracket `[lo, hi]` for `Σ_{n>M} n^w a_n^p` over the tail continuation.
pub fn tail_norm_pow_bracket<T: Scalar>(a: &Seq<T>, w: &WeightParams<T>, use_beta: bool) -> (T, T) {
    let Some(tail) = a.tail() else {
        return (T::zero(), T::zero());
    };
    if tail.amp == T::zero() {
        return (T::zero(), T::zero());
    }
    let m = a.len();
    let e = w.weight(use_beta) - w.p * tail.decay;
    let scale = tail.amp.powf(w.p);
    if tail.ratio == T::one() {
        if e >= -T::one() {
            return (T::infinity(), T::infinity());
        }
        // Decreasing summand: integral test on both sides.
        let lo = power_integral_to_infinity(cn::<T>(m + 1), e);
        let hi = power_integral_to_infinity(cn::<T>(m), e);
        (scale * lo, scale * hi)
    } else {
        let rho = tail.ratio.powf(w.p);
        let first = cn::<T>(m + 1).powf(e) * rho.powf(cn::<T>(m + 1));
        (scale * first, scale * geometric_power_tail(m + 1, e, rho))
    }
}

/// Bracket for the norm of the infinite sequence (stored part plus tail).
pub fn weighted_norm_bracket<T: Scalar>(a: &Seq<T>, w: &WeightParams<T>, use_beta: bool) -> (T, T) {
    let head = weighted_norm_pow(a, w, use_beta);
    let (lo, hi) = tail_norm_pow_bracket(a, w, use_beta);
    let inv = w.p.recip();
    ((head + lo).powf(inv), (head + hi).powf(inv))
}

fn check_len(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::construction("sequence", "length must be >= 1"));
    }
    if m > MAX_SEQ_LEN {
        return Err(Error::PrecisionCap(format!("sequence length {m} exceeds the cap {MAX_SEQ_LEN}")));
    }
    Ok(())
}

fn power_values<T: Scalar>(amp: T, decay: T, from: usize, m: usize) -> Vec<T> {
    (1..=m).map(|n| if n < from { T::zero() } else { amp * cn::<T>(n).powf(-decay) }).collect()
}

/// `a_n = (ε/(1+ε))^(1/p) n^(−(α+1+ε)/p)`, `n <= M`.
pub fn make_epsilon_family<T: Scalar>(w: &WeightParams<T>, eps: T, m: usize) -> Result<Seq<T>> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(Error::domain("make_epsilon_family", format!("eps must be positive, got {eps}")));
    }
    check_len(m)?;
    let amp = (eps / (T::one() + eps)).powf(w.p.recip());
    let decay = (w.alpha + T::one() + eps) / w.p;
    Ok(Seq {
        values: power_values(amp, decay, 1, m),
        family: Family::Epsilon { eps },
        tail: Some(TailProfile { amp, decay, ratio: T::one() }),
    })
}

/// Length needed so that `b^(2M/p) < 1e-16`.
pub fn b_family_length<T: Scalar>(p: T, b: T) -> T {
    (p * c::<T>(16.0) * c::<T>(10.0).ln() / (-c::<T>(2.0) * b.ln())).ceil()
}

/// `ã_n = (1−b²)^(1/p) n^(−α/p) b^(2n/p)`; `M` is extended until
/// `b^(2M/p) < 1e-16`.
pub fn make_b_family<T: Scalar>(w: &WeightParams<T>, b: T, m: usize) -> Result<Seq<T>> {
    if !(b > T::zero() && b < T::one()) {
        return Err(Error::domain("make_b_family", format!("b must lie in (0, 1), got {b}")));
    }
    let needed = b_family_length(w.p, b);
    if needed > cn::<T>(MAX_SEQ_LEN) {
        return Err(Error::PrecisionCap(format!("b = {b} needs {needed} terms, above the cap {MAX_SEQ_LEN}")));
    }
    let m = m.max(needed.to_usize().unwrap_or(1)).max(1);
    check_len(m)?;
    let amp = (T::one() - b * b).powf(w.p.recip());
    let decay = w.alpha / w.p;
    let ratio = b.powf(c::<T>(2.0) / w.p);
    let tail = TailProfile { amp, decay, ratio };
    Ok(Seq { values: (1..=m).map(|n| tail.value(n)).collect(), family: Family::B { b }, tail: Some(tail) })
}

/// `â_n = 0` for `n <= N`, `(τ N^τ)^(1/p) n^(−(1+α+τ)/p)` for `N < n <= M`.
pub fn make_tau_family<T: Scalar>(w: &WeightParams<T>, tau: T, n_cutoff: usize, m: usize) -> Result<Seq<T>> {
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(Error::domain("make_tau_family", format!("tau must be positive, got {tau}")));
    }
    if n_cutoff == 0 || m <= n_cutoff {
        return Err(Error::domain("make_tau_family", format!("requires 1 <= N < M, got N={n_cutoff}, M={m}")));
    }
    check_len(m)?;
    let amp = (tau * cn::<T>(n_cutoff).powf(tau)).powf(w.p.recip());
    let decay = (T::one() + w.alpha + tau) / w.p;
    Ok(Seq {
        values: power_values(amp, decay, n_cutoff + 1, m),
        family: Family::Tau { tau, n_cutoff },
        tail: Some(TailProfile { amp, decay, ratio: T::one() }),
    })
}

/// Result of [`power_series_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSeriesSum<T> {
    /// `Σ_{n<=terms} n^(c−1) t^(2n)`.
    pub sum: T,
    /// Certified bound on the neglected remainder.
    pub tail_bound: T,
    pub terms: usize,
    /// `sum · (1 − t²)^c`.
    pub ratio: T,
}

/// `Σ_{n=1}^{M} n^(c−1) t^(2n)`, extending `M` until the remainder bound
/// drops below `1e-14` of the partial sum or `cap` terms are reached.
pub fn power_series_sum<T: Scalar>(cexp: T, t: T, m: usize, cap: usize) -> Result<PowerSeriesSum<T>> {
    if !(cexp > T::zero() && cexp.is_finite()) {
        return Err(Error::domain("power_series_sum", format!("c must be positive, got {cexp}")));
    }
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::domain("power_series_sum", format!("t must lie in (0, 1), got {t}")));
    }
    let e = cexp - T::one();
    let r = t * t;
    let ln_r = r.ln();
    let rel = c::<T>(1e-14).max(T::epsilon());
    let mut acc = NeumaierSum::new();
    let mut n = 0usize;
    let mut target = m.max(1);
    loop {
        while n < target {
            n += 1;
            let nf = cn::<T>(n);
            acc.add((e * nf.ln() + nf * ln_r).exp());
        }
        let bound = geometric_power_tail(n + 1, e, r);
        let sum = acc.value();
        if bound < rel * sum {
            let ratio = sum * (cexp * (-r).ln_1p()).exp();
            return Ok(PowerSeriesSum { sum, tail_bound: bound, terms: n, ratio });
        }
        if n >= cap {
            return Err(Error::PrecisionCap(format!(
                "power series with c={cexp}, t={t} needs more than {cap} terms"
            )));
        }
        target = (n * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let w = WeightParams::new(3.0f64, 0.7).unwrap();
        assert_eq!(weighted_norm(&Seq::unit(1, 3).unwrap(), &w, false), 1.0);
        let w = WeightParams::new(2.0f64, 1.0).unwrap();
        let a = Seq::custom(vec![1.0, 1.0]).unwrap();
        assert!((weighted_norm(&a, &w, false) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn epsilon_family_examples() {
        let w = WeightParams::new(2.0f64, 0.0).unwrap();
        let a = make_epsilon_family(&w, 1.0, 4).unwrap();
        assert!((a.get(1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((a.get(4) - 0.5f64.sqrt() / 4.0).abs() < 1e-15);
        // Truncated norm^p sits below 1; the infinite-sequence bracket
        // contains (ε/(1+ε)) ζ(1+ε).
        let a = make_epsilon_family(&w, 0.1, 1_000_000).unwrap();
        let head = weighted_norm_pow(&a, &w, false);
        assert!(head < 1.0);
        let (lo, hi) = weighted_norm_bracket(&a, &w, false);
        let zeta_1_1 = 10.584_448_464_950_81;
        let exact = 0.1 / 1.1 * zeta_1_1;
        assert!(lo * lo <= exact && exact <= hi * hi && hi <= 1.0);
    }

    #[test]
    fn b_family_examples() {
        let w = WeightParams::new(2.0f64, 0.0).unwrap();
        let a = make_b_family(&w, 0.5, 10).unwrap();
        assert!((a.get(1) - 0.75f64.sqrt() * 0.5).abs() < 1e-15);
        assert!(a.len() >= b_family_length(2.0, 0.5) as usize);
        // With matching weights the norm^p is exactly b².
        let (lo, hi) = weighted_norm_bracket(&a, &w, false);
        assert!((lo * lo - 0.25).abs() < 1e-15 && (hi * hi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tau_family_examples() {
        let w = WeightParams::new(2.0f64, 0.0).unwrap();
        let a = make_tau_family(&w, 0.5, 1, 10).unwrap();
        assert_eq!(a.get(1), 0.0);
        assert!((a.get(2) - 0.5f64.sqrt() * 2f64.powf(-0.75)).abs() < 1e-15);
        let a = make_tau_family(&w, 0.2, 7, 5000).unwrap();
        let (_, hi) = weighted_norm_bracket(&a, &w, false);
        assert!(hi <= 1.0 + 1e-15);
        assert!(make_tau_family(&w, 0.2, 7, 7).is_err());
    }

    #[test]
    fn power_series_closed_forms() {
        for &t in &[0.5f64, 0.9, 0.99] {
            let r1 = power_series_sum(1.0, t, 10, 1 << 30).unwrap();
            assert!((r1.ratio - t * t).abs() < 1e-13);
            let r2 = power_series_sum(2.0, t, 10, 1 << 30).unwrap();
            assert!((r2.ratio - t * t).abs() < 1e-12);
        }
        assert!(matches!(power_series_sum(0.5f64, 0.999_999, 10, 1000), Err(Error::PrecisionCap(_))));
    }

    #[test]
    fn hypothesis_range() {
        let w = WeightParams::with_beta(2.0f64, 1.0, 0.0).unwrap();
        assert!(w.check_hypothesis().is_err());
        assert!(WeightParams::new(1.0f64, 0.0).is_err());
        assert_eq!(WeightParams::new(4.0f64, 0.0).unwrap().q, 4.0 / 3.0);
    }
}
