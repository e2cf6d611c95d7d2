//! Growth of the ε-family lower bound for `H : ℓ^p_α → ℓ^p_β` when
//! `β > α`, where the operator is unbounded.

use std::time::Instant;

use serde_json::json;

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::operator::{ratio, OperatorContext, TailPolicy, Truncation};
use crate::report::{ExperimentReport, TraceRow};
use crate::scalar::Scalar;
use crate::seqspace::{make_epsilon_family, WeightParams};
use crate::series::power_partial_sum;
use crate::specfun::kernel_tail_integral;

/// `Q(ε, M) = (ε/(1+ε)) Σ_{m<=M} m^(β−α−1−ε) J^p`, where
/// `J = ∫_1^∞ (1+u)^(−1) u^(−(1+α+ε)/p) du`.
///
/// For the Lebesgue kernel, `Q^(1/p)` bounds `‖H a‖_{p,β} / ‖a‖_{p,α}` from
/// below for the ε-family sequence `a`.
pub fn divergence_quantity<T: Scalar>(w: &WeightParams<T>, eps: T, m: u64) -> Result<T> {
    if !(eps > T::zero()) {
        return Err(Error::domain("divergence_quantity", format!("eps must be positive, got {eps}")));
    }
    if m == 0 {
        return Err(Error::domain("divergence_quantity", "M must be >= 1"));
    }
    let one = T::one();
    let gamma = (one + w.alpha + eps) / w.p;
    let j = kernel_tail_integral(one, gamma, one)?;
    let s = power_partial_sum(w.beta - w.alpha - one - eps, m);
    Ok(eps / (one + eps) * s * j.powf(w.p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceConfig<T> {
    pub eps0: T,
    pub m0: u64,
    /// Factor applied to `M` at each step while `ε` halves.
    pub growth: u64,
    /// Number of schedule steps after the first point.
    pub steps: usize,
    /// Length cap for the empirical ratio (truncated, uncertified).
    pub empirical_cap: usize,
}

impl<T: Scalar> Default for DivergenceConfig<T> {
    fn default() -> Self {
        Self { eps0: T::of(0.4), m0: 1000, growth: 16, steps: 6, empirical_cap: 8192 }
    }
}

impl<T: Scalar> DivergenceConfig<T> {
    /// `(ε_k, M_k) = (ε0 2^(−k), M0 growth^k)` for `k = 0..=steps`.
    pub fn schedule(&self) -> Result<Vec<(T, u64)>> {
        let mut out = Vec::with_capacity(self.steps + 1);
        let mut m = self.m0;
        let mut eps = self.eps0;
        for k in 0..=self.steps {
            if k > 0 {
                m = m
                    .checked_mul(self.growth)
                    .ok_or_else(|| Error::Config(format!("M overflows at schedule step {k}")))?;
                eps = eps / T::of(2.0);
            }
            out.push((eps, m));
        }
        Ok(out)
    }
}

/// One schedule point of the divergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergencePoint<T> {
    pub eps: T,
    pub m: u64,
    pub quantity: T,
    /// `Q_k / Q_{k−1}`; `None` at the first point.
    pub factor: Option<T>,
    /// Truncated ε-family ratio at length `min(M, cap)`.
    pub empirical: T,
    /// `Σ m^(β−α−1−ε)` converges (`ε > β−α`).
    pub converges: bool,
}

/// Evaluates the schedule for the Lebesgue kernel.
pub fn divergence_points<T: Scalar>(w: &WeightParams<T>, cfg: &DivergenceConfig<T>) -> Result<Vec<DivergencePoint<T>>> {
    if !(w.beta > w.alpha) {
        return Err(Error::Config(format!("divergence experiment needs beta > alpha, got {} <= {}", w.beta, w.alpha)));
    }
    if !(cfg.eps0 > T::zero()) || cfg.m0 == 0 || cfg.growth == 0 || cfg.empirical_cap < 2 {
        return Err(Error::Config("eps0, m0 and growth must be positive, empirical_cap >= 2".into()));
    }
    let schedule = cfg.schedule()?;
    let m_emp = schedule.iter().map(|&(_, m)| m).max().unwrap_or(1).min(cfg.empirical_cap as u64) as usize;
    let trunc = Truncation { m_in: m_emp, m_out: m_emp, tail_policy: TailPolicy::Ignore };
    let ctx = OperatorContext::new(Measure::lebesgue(), *w, trunc)?;
    let mut points: Vec<DivergencePoint<T>> = Vec::with_capacity(schedule.len());
    for (eps, m) in schedule {
        let quantity = divergence_quantity(w, eps, m)?;
        let factor = points.last().map(|prev| quantity / prev.quantity);
        let len = (m as usize).min(m_emp);
        let empirical = ratio(&ctx, &make_epsilon_family(w, eps, len)?)?.truncated;
        let converges = eps > w.beta - w.alpha;
        points.push(DivergencePoint { eps, m, quantity, factor, empirical, converges });
    }
    Ok(points)
}

/// Reports `Q(ε_k, M_k)` along the schedule with successive growth factors
/// and the truncated empirical ratios.
pub fn divergence_experiment<T: Scalar>(w: &WeightParams<T>, cfg: &DivergenceConfig<T>) -> Result<ExperimentReport> {
    let start = Instant::now();
    let points = divergence_points(w, cfg)?;
    let mut report = ExperimentReport::new(
        "divergence",
        json!({
            "p": w.p.as_f64(), "alpha": w.alpha.as_f64(), "beta": w.beta.as_f64(),
            "eps0": cfg.eps0.as_f64(), "m0": cfg.m0, "growth": cfg.growth, "steps": cfg.steps,
            "empirical_cap": cfg.empirical_cap,
        }),
    );
    report.trace = points
        .iter()
        .map(|pt| TraceRow { parameter: pt.eps.as_f64(), estimate: pt.quantity.as_f64(), slack: 0.0 })
        .collect();
    let best = points.iter().map(|pt| pt.quantity).fold(T::zero(), T::max);
    report.lower = Some(best.powf(w.p.recip()).as_f64());
    let mut flags = Vec::new();
    for pt in &points {
        if pt.converges {
            flags.push(format!("no divergence detected at this eps: eps = {} > beta - alpha", pt.eps));
        }
    }
    report.details = json!({
        "quantity": "Q = (eps/(1+eps)) * sum_{m<=M} m^(beta-alpha-1-eps) * J^p; lower = max Q^(1/p)",
        "points": points.iter().map(|pt| json!({
            "eps": pt.eps.as_f64(), "m": pt.m, "quantity": pt.quantity.as_f64(),
            "factor": pt.factor.map(|f| f.as_f64()),
            "empirical_ratio": pt.empirical.as_f64(),
            "converges": pt.converges,
        })).collect::<Vec<_>>(),
        "flags": flags,
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
