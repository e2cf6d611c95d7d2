//! Power iteration for the largest singular value of the truncated
//! weighted matrix when `p = 2` and `α = β`.

use rayon::prelude::*;

use super::{context_upper_bound, LowerMethod, NormEstimate, TracePoint, UpperMethod};
use crate::error::{Error, Result};
use crate::operator::OperatorContext;
use crate::scalar::{c, cn, Scalar};
use crate::sum::{dot, NeumaierSum};

/// `A_{mn} = m^(α/2) μ[m+n] n^(−α/2)`, `1 <= m, n <= size`.
struct Truncated<'a, T> {
    mu: &'a [T],
    up: Vec<T>,
    down: Vec<T>,
}

impl<'a, T: Scalar> Truncated<'a, T> {
    fn new(ctx: &'a OperatorContext<T>, size: usize) -> Result<Self> {
        let w = ctx.weights();
        if w.p != c(2.0) || w.alpha != w.beta {
            return Err(Error::Hypothesis(format!(
                "power iteration needs p = 2 and alpha = beta, got p = {}, alpha = {}, beta = {}",
                w.p, w.alpha, w.beta
            )));
        }
        if size == 0 {
            return Err(Error::domain("power_iteration_norm", "size must be >= 1"));
        }
        let needed = 2 * size;
        let mu = ctx.moments().as_slice();
        if mu.len() < needed {
            return Err(Error::Horizon { needed, available: mu.len() });
        }
        let half = w.alpha / c(2.0);
        let up = (1..=size).map(|n| cn::<T>(n).powf(half)).collect();
        let down = (1..=size).map(|n| cn::<T>(n).powf(-half)).collect();
        Ok(Self { mu, up, down })
    }

    fn size(&self) -> usize {
        self.up.len()
    }

    // Row m (0-based) holds μ[m+2 ..= m+size+1], i.e. slice [m+1, m+1+size).
    fn hankel(&self, x: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n).into_par_iter().map(|m| dot(&self.mu[m + 1..m + 1 + n], x)).collect()
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        let scaled: Vec<T> = x.iter().zip(&self.down).map(|(&a, &d)| a * d).collect();
        self.hankel(&scaled).into_iter().zip(&self.up).map(|(v, &u)| v * u).collect()
    }

    fn apply_transpose(&self, y: &[T]) -> Vec<T> {
        let scaled: Vec<T> = y.iter().zip(&self.up).map(|(&a, &u)| a * u).collect();
        self.hankel(&scaled).into_iter().zip(&self.down).map(|(v, &d)| v * d).collect()
    }
}

fn norm_sq<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).collect::<NeumaierSum<T>>().value()
}

/// Collatz–Wielandt bound `max_i (Bx)_i / x_i` for `λ_max(B)`, valid when
/// `x > 0` componentwise; `+∞` otherwise.
fn collatz_wielandt<T: Scalar>(x: &[T], bx: &[T]) -> T {
    x.iter()
        .zip(bx)
        .map(|(&a, &b)| if a > T::zero() { b / a } else { T::infinity() })
        .fold(T::zero(), T::max)
}

struct PowerResult<T> {
    sigma: T,
    sigma_upper: T,
}

fn iterate<T: Scalar>(op: &Truncated<'_, T>, iters: usize, tol: T) -> Result<PowerResult<T>> {
    let n = op.size();
    let mut x = vec![T::one() / cn::<T>(n).sqrt(); n];
    let mut rq_prev = T::zero();
    let mut cw = T::infinity();
    for _ in 0..iters.max(1) {
        let ax = op.apply(&x);
        let bx = op.apply_transpose(&ax);
        // ‖x‖ = 1, so the Rayleigh quotient of B = AᵀA is ‖Ax‖².
        let rq = norm_sq(&ax);
        cw = cw.min(collatz_wielandt(&x, &bx));
        let nb = norm_sq(&bx).sqrt();
        if nb == T::zero() {
            return Ok(PowerResult { sigma: T::zero(), sigma_upper: T::zero() });
        }
        if rq > T::zero() && (rq - rq_prev).abs() < tol * rq {
            return Ok(PowerResult { sigma: rq.sqrt(), sigma_upper: cw.max(rq).sqrt() });
        }
        rq_prev = rq;
        x = bx.into_iter().map(|v| v / nb).collect();
    }
    Err(Error::NonConvergence { iters, lower: rq_prev.sqrt().as_f64(), upper: cw.sqrt().as_f64() })
}

/// Largest singular value of the `size × size` truncation, a lower bound
/// on `‖H_μ‖ : ℓ²_α → ℓ²_α` (nonnegative kernel, compression).
///
/// Starts from the all-ones vector and stops once the Rayleigh quotient
/// changes by less than `tol` relative.
pub fn power_iteration_norm<T: Scalar>(
    ctx: &OperatorContext<T>,
    size: usize,
    iters: usize,
    tol: T,
) -> Result<NormEstimate<T>> {
    let op = Truncated::new(ctx, size)?;
    let r = iterate(&op, iters, tol)?;
    Ok(NormEstimate {
        lower: r.sigma,
        upper: context_upper_bound(ctx),
        method_lower: LowerMethod::PowerIteration,
        method_upper: UpperMethod::BetaBound,
        trace: vec![TracePoint { parameter: cn(size), estimate: r.sigma, upper: r.sigma_upper, truncated: r.sigma }],
    })
}

/// Runs [`power_iteration_norm`] for each size; trace entries carry the
/// Collatz–Wielandt upper bound for the truncated matrix.
pub fn power_iteration_trace<T: Scalar>(
    ctx: &OperatorContext<T>,
    sizes: &[usize],
    iters: usize,
    tol: T,
) -> Result<NormEstimate<T>> {
    if sizes.is_empty() {
        return Err(Error::Config("power iteration needs at least one size".into()));
    }
    let mut trace = Vec::with_capacity(sizes.len());
    let mut lower = T::zero();
    for &size in sizes {
        let op = Truncated::new(ctx, size)?;
        let r = iterate(&op, iters, tol)?;
        lower = lower.max(r.sigma);
        trace.push(TracePoint { parameter: cn(size), estimate: r.sigma, upper: r.sigma_upper, truncated: r.sigma });
    }
    Ok(NormEstimate {
        lower,
        upper: context_upper_bound(ctx),
        method_lower: LowerMethod::PowerIteration,
        method_upper: UpperMethod::BetaBound,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Measure;
    use crate::operator::{TailPolicy, Truncation};
    use crate::seqspace::WeightParams;

    fn ctx(mu: Measure<f64>, alpha: f64, h: usize) -> OperatorContext<f64> {
        let w = WeightParams::new(2.0, alpha).unwrap();
        OperatorContext::new(mu, w, Truncation { m_in: h, m_out: h, tail_policy: TailPolicy::Ignore }).unwrap()
    }

    #[test]
    fn one_by_one_is_second_moment() {
        let c = ctx(Measure::lebesgue(), 0.0, 4);
        let e = power_iteration_norm(&c, 1, 100, 1e-12).unwrap();
        assert!((e.lower - 0.5).abs() < 1e-15);
        assert!((e.upper - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn dirac_two_by_two() {
        let c = ctx(Measure::dirac(0.5).unwrap(), 0.0, 4);
        let e = power_iteration_norm(&c, 2, 1000, 1e-14).unwrap();
        assert!((e.lower - 0.625).abs() < 1e-12, "{}", e.lower);
    }

    #[test]
    fn weighted_matches_unweighted_singular_value_bound() {
        // Nested truncations never decrease.
        let c = ctx(Measure::lebesgue(), 0.5, 128);
        let e = power_iteration_trace(&c, &[16, 32, 64, 128], 20_000, 1e-12).unwrap();
        for w in e.trace.windows(2) {
            assert!(w[1].estimate >= w[0].estimate - 1e-12);
        }
        assert!(e.lower <= e.upper);
    }

    #[test]
    fn rejects_p_not_two() {
        let w = WeightParams::new(3.0, 0.0).unwrap();
        let c = OperatorContext::new(
            Measure::lebesgue(),
            w,
            Truncation { m_in: 8, m_out: 8, tail_policy: TailPolicy::Ignore },
        )
        .unwrap();
        assert!(matches!(power_iteration_norm(&c, 4, 10, 1e-10), Err(Error::Hypothesis(_))));
    }
}
