//! The operator `H_μ a(m) = Σ_n μ[m+n] a_n`: truncated application,
//! certified tail accounting, norm ratios, Schur weights and kernel bounds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{moment_table, Measure, MomentEnvelope, MomentTable};
use crate::scalar::{c, cn, Scalar};
use crate::seqspace::{tail_norm_pow_bracket, weighted_norm_pow, Seq, TailProfile, WeightParams};
use crate::series::{geometric_power_tail, ln_power_integral, power_integral_to_infinity};
use crate::specfun::{beta, kernel_tail_integral, pi_csc};
use crate::sum::{dot, NeumaierSum};

/// How the parts of the infinite problem outside the truncated grid are
/// treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    /// Attach certified lower/upper bounds for every neglected part.
    Bound,
    /// Report the truncated finite-matrix value only; results are flagged
    /// as uncertified.
    Ignore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub m_in: usize,
    pub m_out: usize,
    pub tail_policy: TailPolicy,
}

/// Measure, precomputed moments, weights and truncation for one operator.
#[derive(Debug, Clone)]
pub struct OperatorContext<T> {
    measure: Measure<T>,
    moments: MomentTable<T>,
    weights: WeightParams<T>,
    truncation: Truncation,
}

impl<T: Scalar> OperatorContext<T> {
    /// Tabulates moments up to `m_in + m_out`.
    pub fn new(measure: Measure<T>, weights: WeightParams<T>, truncation: Truncation) -> Result<Self> {
        check_truncation(&truncation)?;
        let moments = moment_table(&measure, truncation.m_in + truncation.m_out)?;
        Self::with_moments(measure, moments, weights, truncation)
    }

    /// Uses an existing moment table, which must reach `m_in + m_out`.
    pub fn with_moments(
        measure: Measure<T>,
        moments: MomentTable<T>,
        weights: WeightParams<T>,
        truncation: Truncation,
    ) -> Result<Self> {
        check_truncation(&truncation)?;
        let needed = truncation.m_in + truncation.m_out;
        if moments.n_max() < needed {
            return Err(Error::Horizon { needed, available: moments.n_max() });
        }
        Ok(Self { measure, moments, weights, truncation })
    }

    pub fn measure(&self) -> &Measure<T> {
        &self.measure
    }

    pub fn moments(&self) -> &MomentTable<T> {
        &self.moments
    }

    pub fn weights(&self) -> &WeightParams<T> {
        &self.weights
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Same measure and moments with different weights or tail policy.
    pub fn reconfigured(&self, weights: WeightParams<T>, tail_policy: TailPolicy) -> Self {
        Self {
            measure: self.measure.clone(),
            moments: self.moments.clone(),
            weights,
            truncation: Truncation { tail_policy, ..self.truncation },
        }
    }
}

fn check_truncation(t: &Truncation) -> Result<()> {
    if t.m_in == 0 || t.m_out == 0 {
        return Err(Error::construction("operator context", "M_in and M_out must be >= 1"));
    }
    Ok(())
}

/// Output of [`apply`]: `(H_μ a)(m)` for `m <= M_out` plus, under
/// [`TailPolicy::Bound`], per-entry bounds on the neglected input tail
/// `Σ_{n>M} μ[m+n] a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied<T> {
    pub output: Seq<T>,
    pub tail_lower: Vec<T>,
    pub tail_upper: Vec<T>,
    pub certified: bool,
}

/// Dense truncated product `Σ_{n<=M} μ[m+n] a_n`, `m = 1..=M_out`.
fn dense_apply<T: Scalar>(ctx: &OperatorContext<T>, a: &Seq<T>) -> Vec<T> {
    let mu = ctx.moments.as_slice();
    let av = a.values();
    let first = av.iter().position(|v| *v != T::zero()).unwrap_or(av.len());
    let av = &av[first..];
    // μ[m + n] sits at index m + n − 1.
    (1..=ctx.truncation.m_out)
        .into_par_iter()
        .map(|m| {
            let start = m + first;
            dot(&mu[start..start + av.len()], av)
        })
        .collect()
}

fn envelope_for<T: Scalar>(ctx: &OperatorContext<T>, len: usize) -> MomentEnvelope<T> {
    ctx.measure.envelope(len.min(ctx.truncation.m_out) + 2)
}

/// Bounds on `Σ_{n>M} μ[m+n] a_n` for one output index.
fn input_tail<T: Scalar>(env: &MomentEnvelope<T>, tail: &TailProfile<T>, len: usize, m: usize) -> (T, T) {
    if tail.amp == T::zero() {
        return (T::zero(), T::zero());
    }
    let one = T::one();
    let (mf, big_m) = (cn::<T>(m), cn::<T>(len));
    let (kappa, gam, r, amp) = (env.kappa, tail.decay, tail.ratio, tail.amp);
    let first_k = cn::<T>(m + len + 1);
    let (mut lo, mut hi);
    if r == one {
        if gam < T::zero() {
            return (T::zero(), T::infinity());
        }
        let scale = amp * mf.powf(one - kappa - gam);
        let j_hi = kernel_tail_integral(kappa, gam, big_m / mf).unwrap_or(T::infinity());
        let j_lo = kernel_tail_integral(kappa, gam, (big_m + one) / mf).unwrap_or(T::infinity());
        hi = env.power_hi * scale * j_hi;
        lo = env.power_lo * scale * j_lo;
    } else {
        let first_term = tail.value(len + 1);
        hi = env.power_hi * amp * first_k.powf(-kappa) * geometric_power_tail(len + 1, -gam, r);
        lo = env.power_lo * first_k.powf(-kappa) * first_term;
    }
    for g in &env.geometric {
        if g.t > T::zero() {
            hi += g.coef * amp * g.t.powf(mf - one) * geometric_power_tail(len + 1, -gam, g.t * r);
        }
    }
    if lo.is_nan() {
        lo = T::zero();
    }
    (lo, hi)
}

/// Applies the truncated operator to `a` (`a.len() <= M_in`).
pub fn apply<T: Scalar>(ctx: &OperatorContext<T>, a: &Seq<T>) -> Result<Applied<T>> {
    if a.len() > ctx.truncation.m_in {
        return Err(Error::Horizon { needed: a.len(), available: ctx.truncation.m_in });
    }
    let values = dense_apply(ctx, a);
    let m_out = ctx.truncation.m_out;
    let (tail_lower, tail_upper, certified) = match (ctx.truncation.tail_policy, a.tail()) {
        (TailPolicy::Ignore, Some(_)) => (vec![T::zero(); m_out], vec![T::zero(); m_out], false),
        (_, None) => (vec![T::zero(); m_out], vec![T::zero(); m_out], true),
        (TailPolicy::Bound, Some(tail)) => {
            let env = envelope_for(ctx, a.len());
            let (lo, hi): (Vec<T>, Vec<T>) =
                (1..=m_out).into_par_iter().map(|m| input_tail(&env, &tail, a.len(), m)).unzip();
            (lo, hi, true)
        }
    };
    Ok(Applied { output: Seq::custom(values)?, tail_lower, tail_upper, certified })
}

/// Norm ratio `‖H_μ a‖_{p,β} / ‖a‖_{p,α}` of the infinite sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBounds<T> {
    /// Ratio of the truncated output to the truncated input.
    pub truncated: T,
    /// Certified lower bound for the infinite sequence (equals `truncated`
    /// when uncertified).
    pub lower: T,
    /// Certified upper bound for the infinite sequence.
    pub upper: T,
    pub certified: bool,
}

impl<T: Scalar> RatioBounds<T> {
    pub fn slack(&self) -> T {
        self.upper - self.lower
    }
}

/// Block boundaries and partial sums for the output tail `m > M_out`.
struct OutputTail<T> {
    lower: T,
    upper: T,
}

/// `Σ_{n<=M} (1 + n/x)^(−κ) a_n`.
fn shifted_sum<T: Scalar>(a: &[T], x: T, kappa: T) -> T {
    let mut acc = NeumaierSum::new();
    if kappa == T::one() {
        for (i, &v) in a.iter().enumerate() {
            if v != T::zero() {
                acc.add(v * x / (x + cn::<T>(i + 1)));
            }
        }
    } else {
        for (i, &v) in a.iter().enumerate() {
            if v != T::zero() {
                acc.add(v * (T::one() + cn::<T>(i + 1) / x).powf(-kappa));
            }
        }
    }
    acc.value()
}

/// Logarithms of lower and upper integral bounds for `Σ_{m=lo}^{hi} m^e`
/// (integers).
fn ln_block_power_sum<T: Scalar>(lo: T, hi: T, e: T) -> (T, T) {
    let one = T::one();
    if e <= T::zero() {
        (ln_power_integral(lo, hi + one, e), ln_power_integral(lo - one, hi, e))
    } else {
        (ln_power_integral(lo - one, hi, e), ln_power_integral(lo, hi + one, e))
    }
}

/// `y^p · exp(ln_sum)` without overflow in `y^p`.
fn block_term<T: Scalar>(y: T, p: T, ln_sum: T) -> T {
    if y == T::zero() {
        return T::zero();
    }
    (p * y.ln() + ln_sum).exp()
}

fn output_tail<T: Scalar>(ctx: &OperatorContext<T>, a: &Seq<T>, env: &MomentEnvelope<T>) -> OutputTail<T> {
    let w = ctx.weights;
    let (p, bet) = (w.p, w.beta);
    let one = T::one();
    let kappa = env.kappa;
    let len = a.len();
    let big_m = cn::<T>(len);
    let av = a.values();
    let sum_a = crate::sum::sum(av);
    let tail = a.tail().filter(|t| t.amp > T::zero());
    let e_block = bet - p * kappa;

    // Geometric block boundaries b_0 = M_out < b_1 < ... up to B_END.
    let growth = if kappa == one { c::<T>(2f64.powf(1.0 / 16.0)) } else { c::<T>(2f64.powf(0.25)) };
    let b_end = c::<T>(1e280).min(T::max_value().powf(c(0.9)));
    let mut bounds = vec![cn::<T>(ctx.truncation.m_out)];
    while *bounds.last().expect("nonempty") < b_end {
        let b = *bounds.last().expect("nonempty");
        bounds.push((b * growth).floor().max(b + one));
    }
    let cheap_from = c::<T>(1e4) * big_m;
    let s_at: Vec<T> = bounds
        .par_iter()
        .map(|&b| {
            let x = b + one;
            if x >= cheap_from {
                T::nan()
            } else {
                shifted_sum(av, x, kappa)
            }
        })
        .collect();
    // Lower and upper values of Σ_{n<=M}(1+n/x)^(−κ) a_n at x = b_j + 1.
    let s_lo = |j: usize| {
        let v = s_at[j];
        if v.is_nan() {
            (one + big_m / (bounds[j] + one)).powf(-kappa) * sum_a
        } else {
            v
        }
    };
    let s_hi = |j: usize| if s_at[j].is_nan() { sum_a } else { s_at[j] };

    // Σ_{n>M} (1+n/x)^(−κ) a_n, bounded below and above.
    let tail_shift = |x: T, upper: bool| -> T {
        let Some(t) = tail else { return T::zero() };
        if t.ratio == one {
            if upper {
                t.amp * x.powf(one - t.decay) * kernel_tail_integral(kappa, t.decay, big_m / x).unwrap_or(T::infinity())
            } else {
                t.amp * x.powf(one - t.decay) * kernel_tail_integral(kappa, t.decay, (big_m + one) / x).unwrap_or(T::infinity())
            }
        } else if upper {
            t.amp * geometric_power_tail(len + 1, -t.decay, t.ratio)
        } else {
            (one + (big_m + one) / x).powf(-kappa) * t.value(len + 1)
        }
    };

    let mut lower = NeumaierSum::new();
    let mut upper = NeumaierSum::new();
    for j in 0..bounds.len() - 1 {
        let (b0, b1) = (bounds[j], bounds[j + 1]);
        let (ln_lo, ln_hi) = ln_block_power_sum(b0 + one, b1, e_block);
        let y_lo = env.power_lo * (s_lo(j) + tail_shift(b0 + one, false));
        let y_hi = env.power_hi * (s_hi(j + 1) + tail_shift(b1, true));
        lower.add(block_term(y_lo, p, ln_lo));
        upper.add(block_term(y_hi, p, ln_hi));
    }

    // Final block m > b_J.
    let b_last = *bounds.last().expect("nonempty");
    let mut final_lo = T::zero();
    let mut final_hi = env.power_hi * sum_a * power_integral_to_infinity(b_last, e_block).powf(p.recip());
    if let Some(t) = tail {
        if t.ratio == one {
            let e2 = bet + p * (one - kappa - t.decay);
            let j_lo = kernel_tail_integral(kappa, t.decay, (big_m + one) / (b_last + one)).unwrap_or(T::zero());
            let coef = env.power_lo * t.amp * j_lo;
            if coef > T::zero() {
                final_lo = coef.powf(p) * power_integral_to_infinity(b_last + one, e2);
            }
            let growth_term = if t.decay < one {
                let j0 = kernel_tail_integral(kappa, t.decay, T::zero()).unwrap_or(T::infinity());
                env.power_hi * t.amp * j0 * power_integral_to_infinity(b_last, e2).powf(p.recip())
            } else if t.decay > one {
                let cst = big_m.powf(one - t.decay) / (t.decay - one);
                env.power_hi * t.amp * cst * power_integral_to_infinity(b_last, e_block).powf(p.recip())
            } else {
                T::infinity()
            };
            final_hi += growth_term;
        } else {
            let g = t.amp * geometric_power_tail(len + 1, -t.decay, t.ratio);
            final_hi += env.power_hi * g * power_integral_to_infinity(b_last, e_block).powf(p.recip());
        }
    }
    lower.add(final_lo);
    let power_norm = (upper.value() + final_hi.powf(p)).powf(p.recip());

    // Point masses: Σ_n t^(m+n−1) a_n = t^m A_t; Minkowski across terms.
    let mut atom_norm = T::zero();
    for g in env.geometric.iter().filter(|g| g.t > T::zero()) {
        let mut at = NeumaierSum::new();
        for (i, &v) in av.iter().enumerate() {
            at.add(v * g.t.powf(cn::<T>(i)));
        }
        let mut a_t = at.value();
        if let Some(t) = tail {
            a_t += t.amp / g.t * geometric_power_tail(len + 1, -t.decay, g.t * t.ratio);
        }
        let weight = geometric_power_tail(ctx.truncation.m_out + 1, bet, g.t.powf(p));
        atom_norm += g.coef * a_t * weight.powf(p.recip());
    }
    let mut up = (power_norm + atom_norm).powf(p);
    if up.is_nan() {
        up = T::infinity();
    }
    OutputTail { lower: lower.value(), upper: up }
}

/// Computes `‖H_μ a‖_{p,β} / ‖a‖_{p,α}`.
///
/// Under [`TailPolicy::Bound`] the result brackets the ratio for the
/// infinite sequence described by `a` (stored values plus its family
/// continuation), including every output index `m >= 1`.
pub fn ratio<T: Scalar>(ctx: &OperatorContext<T>, a: &Seq<T>) -> Result<RatioBounds<T>> {
    if a.is_zero() {
        return Err(Error::ZeroSequence);
    }
    let applied = apply(ctx, a)?;
    let w = ctx.weights;
    let p = w.p;
    let inv = p.recip();
    let y = applied.output.values();
    let mut num = NeumaierSum::new();
    let mut num_lo = NeumaierSum::new();
    let mut num_hi = NeumaierSum::new();
    for (i, &v) in y.iter().enumerate() {
        let wt = cn::<T>(i + 1).powf(w.beta);
        num.add(wt * v.powf(p));
        num_lo.add(wt * (v + applied.tail_lower[i]).powf(p));
        num_hi.add(wt * (v + applied.tail_upper[i]).powf(p));
    }
    let den = weighted_norm_pow(a, &w, false);
    if den == T::zero() {
        return Err(Error::ZeroSequence);
    }
    let truncated = (num.value() / den).powf(inv);
    if ctx.truncation.tail_policy == TailPolicy::Ignore {
        return Ok(RatioBounds { truncated, lower: truncated, upper: truncated, certified: false });
    }
    let env = envelope_for(ctx, a.len());
    let out = output_tail(ctx, a, &env);
    let (den_tail_lo, den_tail_hi) = tail_norm_pow_bracket(a, &w, false);
    let lower = ((num_lo.value() + out.lower) / (den + den_tail_hi)).powf(inv);
    let upper = ((num_hi.value() + out.upper) / (den + den_tail_lo)).powf(inv);
    let lower = if lower.is_nan() { T::zero() } else { lower };
    let upper = if upper.is_nan() { T::infinity() } else { upper };
    Ok(RatioBounds { truncated, lower, upper, certified: true })
}

/// A Schur-test weight: partial sum, certified bracket for the full series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurWeight<T> {
    pub partial_sum: T,
    /// Partial sum plus an integral lower bound on the remainder.
    pub lower: T,
    /// Partial sum plus an integral upper bound on the remainder.
    pub certified_upper: T,
    /// Closed-form Beta bound for the full series.
    pub beta_bound: T,
}

/// `Σ_{k<=M} (k + x)^(−e1) k^(−e2)` times `scale`, with integral remainder
/// bounds.
fn schur_series<T: Scalar>(x: usize, e1: T, e2: T, scale: T, horizon: usize) -> Result<(T, T, T)> {
    let xf = cn::<T>(x);
    let mut acc = NeumaierSum::new();
    for k in 1..=horizon {
        let kf = cn::<T>(k);
        acc.add((kf + xf).powf(-e1) * kf.powf(-e2));
    }
    let partial = acc.value();
    // ∫_z^∞ (x+u)^(−e1) u^(−e2) du = x^(1−e1−e2) J(e1, e2, z/x).
    let front = xf.powf(T::one() - e1 - e2);
    let hf = cn::<T>(horizon);
    let t_hi = front * kernel_tail_integral(e1, e2, hf / xf)?;
    let t_lo = front * kernel_tail_integral(e1, e2, (hf + T::one()) / xf)?;
    Ok((scale * partial, scale * (partial + t_lo), scale * (partial + t_hi)))
}

fn schur_beta<T: Scalar>(w: &WeightParams<T>) -> Result<T> {
    beta((T::one() + w.beta) / w.p, T::one() - (T::one() + w.alpha) / w.p)
}

/// `W1(n) = Σ_m (m+n)^(−1−(β−α)/p) n^((1+α)/q) m^(−(1−(1+β)/p))`.
pub fn schur_weight_1<T: Scalar>(w: &WeightParams<T>, n: usize, horizon: usize) -> Result<SchurWeight<T>> {
    w.check_hypothesis()?;
    if n == 0 || horizon == 0 {
        return Err(Error::domain("schur_weight_1", "n and the horizon must be >= 1"));
    }
    let one = T::one();
    let e1 = w.carleson_exponent();
    let e2 = one - (one + w.beta) / w.p;
    let scale = cn::<T>(n).powf((one + w.alpha) / w.q);
    let (partial_sum, lower, certified_upper) = schur_series(n, e1, e2, scale, horizon)?;
    let beta_bound = schur_beta(w)? * cn::<T>(n).powf(w.alpha);
    Ok(SchurWeight { partial_sum, lower, certified_upper, beta_bound })
}

/// `W2(m) = Σ_n (m+n)^(−1−(β−α)/p) m^((q−1)(1−(1+β)/p)) n^(−(1+α)/p)`.
pub fn schur_weight_2<T: Scalar>(w: &WeightParams<T>, m: usize, horizon: usize) -> Result<SchurWeight<T>> {
    w.check_hypothesis()?;
    if m == 0 || horizon == 0 {
        return Err(Error::domain("schur_weight_2", "m and the horizon must be >= 1"));
    }
    let one = T::one();
    let e1 = w.carleson_exponent();
    let e2 = (one + w.alpha) / w.p;
    let scale = cn::<T>(m).powf((w.q - one) * (one - (one + w.beta) / w.p));
    let (partial_sum, lower, certified_upper) = schur_series(m, e1, e2, scale, horizon)?;
    let beta_bound = schur_beta(w)? * cn::<T>(m).powf((one - w.q) * w.beta);
    Ok(SchurWeight { partial_sum, lower, certified_upper, beta_bound })
}

/// `sup_{2<=k<=H} μ[k] k^(1+(β−α)/p)` over the tabulated horizon.
pub fn kernel_upper_ratio<T: Scalar>(ctx: &OperatorContext<T>) -> T {
    let s = ctx.weights.carleson_exponent();
    let mu = ctx.moments.as_slice();
    (2..=mu.len()).map(|k| mu[k - 1] * cn::<T>(k).powf(s)).fold(T::zero(), T::max)
}

/// Upper bound for `sup_{k>=2} μ[k] k^(1+(β−α)/p)`: the tabulated supremum
/// combined with the analytic envelope beyond the horizon. `+∞` when the
/// envelope decays more slowly than the target exponent.
pub fn certified_kernel_constant<T: Scalar>(ctx: &OperatorContext<T>) -> T {
    let s = ctx.weights.carleson_exponent();
    let h = ctx.moments.n_max();
    let finite = kernel_upper_ratio(ctx);
    let env = ctx.measure.envelope(h + 1);
    let k0 = cn::<T>(h + 1);
    let mut beyond = T::zero();
    if env.power_hi > T::zero() {
        if s > env.kappa {
            return T::infinity();
        }
        beyond += env.power_hi * k0.powf(s - env.kappa);
    }
    for g in &env.geometric {
        if g.t == T::zero() {
            continue;
        }
        // t^(x−1) x^s peaks at x = s / (−ln t).
        let peak = s / (-g.t.ln());
        let x = if peak > k0 { peak } else { k0 };
        beyond += g.coef * (g.t.ln() * (x - T::one())).exp() * x.powf(s);
    }
    finite.max(beyond)
}

/// `kernel_const · B((1+β)/p, 1−(1+α)/p)`; equals `kernel_const · π csc(π(1+α)/p)`
/// when `α = β`.
pub fn upper_bound_beta<T: Scalar>(w: &WeightParams<T>, kernel_const: T) -> Result<T> {
    w.check_hypothesis()?;
    if !(kernel_const >= T::zero()) {
        return Err(Error::domain("upper_bound_beta", format!("kernel constant must be >= 0, got {kernel_const}")));
    }
    let b = if w.alpha == w.beta { pi_csc((T::one() + w.alpha) / w.p)? } else { schur_beta(w)? };
    Ok(kernel_const * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Density;
    use crate::seqspace::make_epsilon_family;

    fn ctx(mu: Measure<f64>, p: f64, alpha: f64, m_in: usize, m_out: usize) -> OperatorContext<f64> {
        let w = WeightParams::new(p, alpha).unwrap();
        OperatorContext::new(mu, w, Truncation { m_in, m_out, tail_policy: TailPolicy::Bound }).unwrap()
    }

    #[test]
    fn apply_examples() {
        let e1 = Seq::unit(1, 8).unwrap();
        let c = ctx(Measure::lebesgue(), 2.0, 0.0, 8, 16);
        let y = apply(&c, &e1).unwrap();
        for m in 1..=16 {
            assert!((y.output.get(m) - 1.0 / (m + 1) as f64).abs() < 1e-16);
        }
        let c = ctx(Measure::dirac(0.5).unwrap(), 2.0, 0.0, 8, 16);
        let y = apply(&c, &e1).unwrap();
        for m in 1..=16 {
            assert_eq!(y.output.get(m), 0.5f64.powi(m as i32));
        }
        let c = ctx(Measure::dirac(0.0).unwrap(), 2.0, 0.0, 8, 16);
        let a = Seq::custom(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(apply(&c, &a).unwrap().output.values().iter().all(|&v| v == 0.0));
        let long = Seq::unit(1, 9).unwrap();
        assert!(matches!(apply(&c, &long), Err(Error::Horizon { .. })));
    }

    #[test]
    fn unit_vector_ratio_brackets_zeta_value() {
        let want = (std::f64::consts::PI.powi(2) / 6.0 - 1.0).sqrt();
        let c = ctx(Measure::lebesgue(), 2.0, 0.0, 4, 4096);
        let r = ratio(&c, &Seq::unit(1, 1).unwrap()).unwrap();
        assert!(r.truncated < want);
        assert!(r.lower <= want && want <= r.upper, "{r:?}");
        assert!(r.upper - r.lower < 1e-3);
    }

    #[test]
    fn ratio_is_scale_invariant_and_zero_rejected() {
        let c = ctx(Measure::lebesgue(), 2.0, 0.0, 2000, 256);
        let w = *c.weights();
        let a = make_epsilon_family(&w, 0.3, 2000).unwrap();
        let r1 = ratio(&c, &a).unwrap();
        let r2 = ratio(&c, &a.scaled(7.5).unwrap()).unwrap();
        assert!(((r1.lower - r2.lower) / r1.lower).abs() < 1e-12);
        assert!(((r1.upper - r2.upper) / r1.upper).abs() < 1e-12);
        let z = Seq::custom(vec![0.0; 4]).unwrap();
        assert!(matches!(ratio(&c, &z), Err(Error::ZeroSequence)));
        let d0 = ctx(Measure::dirac(0.0).unwrap(), 2.0, 0.0, 2000, 256);
        let r = ratio(&d0, &a).unwrap();
        assert_eq!((r.lower, r.upper), (0.0, 0.0));
    }

    #[test]
    fn epsilon_family_ratio_stays_below_pi() {
        let c = ctx(Measure::lebesgue(), 2.0, 0.0, 20_000, 512);
        let a = make_epsilon_family(c.weights(), 0.2, 20_000).unwrap();
        let r = ratio(&c, &a).unwrap();
        assert!(r.lower <= r.upper && r.upper <= std::f64::consts::PI);
        assert!(r.lower > 0.75 * std::f64::consts::PI, "{r:?}");
    }

    #[test]
    fn kernel_examples() {
        let c = ctx(Measure::lebesgue(), 2.0, 0.0, 100, 100);
        assert!((kernel_upper_ratio(&c) - 1.0).abs() < 1e-15);
        assert!((certified_kernel_constant(&c) - 1.0).abs() < 1e-11);
        let c = ctx(Measure::dirac(0.5).unwrap(), 2.0, 0.0, 100, 100);
        // max_k 0.5^(k−1) k is attained at k = 2 and k = 1... restricted to k >= 2.
        assert_eq!(kernel_upper_ratio(&c), 1.0);
        let o = Measure::with_density(Density::OneMinusTPower { c: 1.0, s: 2.0 }, "1-t").unwrap();
        let w = WeightParams::with_beta(2.0, -0.9, 1.1).unwrap();
        let c = OperatorContext::new(o, w, Truncation { m_in: 500, m_out: 500, tail_policy: TailPolicy::Bound })
            .unwrap();
        let k: f64 = kernel_upper_ratio(&c);
        assert!((k - 1000.0 / 1001.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_examples() {
        let w = WeightParams::new(2.0f64, 0.0).unwrap();
        assert!((upper_bound_beta(&w, 1.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let w = WeightParams::new(4.0f64, 0.0).unwrap();
        assert!((upper_bound_beta(&w, 1.0).unwrap() - 4.442_882_938_158_366).abs() < 1e-14);
        let w = WeightParams::with_beta(2.0f64, 0.0, 0.5).unwrap();
        assert!((upper_bound_beta(&w, 1.0).unwrap() - 2.396_280_469_471_184).abs() < 1e-12);
        let w = WeightParams::new(2.0f64, 1.0).unwrap();
        assert!(matches!(upper_bound_beta(&w, 1.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn schur_examples() {
        let w = WeightParams::new(2.0f64, 0.0).unwrap();
        let w1 = schur_weight_1(&w, 1, 100_000).unwrap();
        assert!(w1.partial_sum < std::f64::consts::PI);
        assert!(w1.certified_upper <= w1.beta_bound);
        let w2 = schur_weight_2(&w, 1, 100_000).unwrap();
        assert_eq!(w1.partial_sum, w2.partial_sum);
    }
}
