//! Operator-norm estimation: Beta-bound upper estimates, certified lower
//! bounds from the test-sequence families, power iteration, and the
//! sharpness and divergence experiments.

mod divergence;
mod power;
mod sharpness;

pub use divergence::{divergence_experiment, divergence_points, divergence_quantity, DivergenceConfig, DivergencePoint};
pub use power::{power_iteration_norm, power_iteration_trace};
pub use sharpness::{
    cutoff_n, dpa, epa, floor_bound, fpa, j_eps, sharpness_cells, sharpness_experiment, EpaValue, SharpnessCell,
    SharpnessConfig, J_EPS_GRID,
};

use std::time::Instant;

use serde_json::json;

pub use crate::operator::upper_bound_beta;
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::operator::{certified_kernel_constant, ratio, OperatorContext, RatioBounds, TailPolicy, Truncation};
use crate::report::{ExperimentReport, TraceRow};
use crate::scalar::Scalar;
use crate::seqspace::{make_b_family, make_epsilon_family, make_tau_family, WeightParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerMethod {
    EpsilonFamily,
    BFamily,
    TauFamily,
    PowerIteration,
}

impl LowerMethod {
    pub fn name(&self) -> &'static str {
        match self {
            LowerMethod::EpsilonFamily => "epsilon_family",
            LowerMethod::BFamily => "b_family",
            LowerMethod::TauFamily => "tau_family",
            LowerMethod::PowerIteration => "power_iteration",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperMethod {
    BetaBound,
    KernelDomination,
}

/// One point of a lower-bound trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<T> {
    pub parameter: T,
    /// Certified lower bound achieved at this parameter.
    pub estimate: T,
    /// Upper end of the bracket for the same quantity.
    pub upper: T,
    /// Value on the truncated finite grid, without tail corrections.
    pub truncated: T,
}

impl<T: Scalar> TracePoint<T> {
    pub fn slack(&self) -> T {
        self.upper - self.estimate
    }
}

/// Lower and upper estimates of an operator norm with their trace.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate<T> {
    pub lower: T,
    pub upper: T,
    pub method_lower: LowerMethod,
    pub method_upper: UpperMethod,
    pub trace: Vec<TracePoint<T>>,
}

/// One step of a family schedule: the family parameter and the sequence
/// length used for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyPoint<T> {
    Epsilon { eps: T, len: usize },
    B { b: T, len: usize },
    Tau { tau: T, n_cutoff: usize, len: usize },
}

impl<T: Scalar> FamilyPoint<T> {
    fn method(&self) -> LowerMethod {
        match self {
            FamilyPoint::Epsilon { .. } => LowerMethod::EpsilonFamily,
            FamilyPoint::B { .. } => LowerMethod::BFamily,
            FamilyPoint::Tau { .. } => LowerMethod::TauFamily,
        }
    }

    fn parameter(&self) -> T {
        match self {
            FamilyPoint::Epsilon { eps, .. } => *eps,
            FamilyPoint::B { b, .. } => *b,
            FamilyPoint::Tau { tau, .. } => *tau,
        }
    }

    fn ratio(&self, ctx: &OperatorContext<T>) -> Result<RatioBounds<T>> {
        let w = ctx.weights();
        let seq = match *self {
            FamilyPoint::Epsilon { eps, len } => make_epsilon_family(w, eps, len)?,
            FamilyPoint::B { b, len } => make_b_family(w, b, len)?,
            FamilyPoint::Tau { tau, n_cutoff, len } => make_tau_family(w, tau, n_cutoff, len)?,
        };
        ratio(ctx, &seq)
    }
}

/// Certified operator-norm upper bound for the context's measure and
/// weights, `+∞` when the Beta chain does not apply.
pub fn context_upper_bound<T: Scalar>(ctx: &OperatorContext<T>) -> T {
    let w = ctx.weights();
    if !w.in_hypothesis_range() {
        return T::infinity();
    }
    upper_bound_beta(w, certified_kernel_constant(ctx)).unwrap_or(T::infinity())
}

/// Evaluates the family ratio at every schedule point; `lower` is the
/// running maximum of the certified lower ends.
pub fn lower_bound_family<T: Scalar>(ctx: &OperatorContext<T>, schedule: &[FamilyPoint<T>]) -> Result<NormEstimate<T>> {
    let first = schedule.first().ok_or_else(|| Error::Config("empty family schedule".into()))?;
    let method_lower = first.method();
    if schedule.iter().any(|p| p.method() != method_lower) {
        return Err(Error::Config("a schedule must use a single family".into()));
    }
    let mut trace = Vec::with_capacity(schedule.len());
    let mut lower = T::zero();
    for point in schedule {
        let r = point.ratio(ctx)?;
        lower = lower.max(r.lower);
        trace.push(TracePoint { parameter: point.parameter(), estimate: r.lower, upper: r.upper, truncated: r.truncated });
    }
    Ok(NormEstimate { lower, upper: context_upper_bound(ctx), method_lower, method_upper: UpperMethod::BetaBound, trace })
}

/// Linear extrapolation of the last two trace points to parameter 0.
pub(crate) fn extrapolate_to_zero<T: Scalar>(points: &[(T, T)]) -> Option<T> {
    let [.., (x1, y1), (x2, y2)] = points else { return None };
    if x1 == x2 {
        return None;
    }
    Some(*y2 - *x2 * (*y1 - *y2) / (*x1 - *x2))
}

pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Parameters of the sharp-constant experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct NormConfig<T> {
    /// Decreasing ε schedule for the epsilon family.
    pub eps_list: Vec<T>,
    /// Sequence length `M(ε) = min(ceil(len_scale/ε), len_max)`.
    pub len_scale: T,
    pub len_max: usize,
    pub m_out: usize,
    /// Optional power-iteration sizes (`p = 2`, `α = β` only).
    pub power_sizes: Vec<usize>,
    pub power_iters: usize,
    pub power_tol: T,
}

impl<T: Scalar> Default for NormConfig<T> {
    fn default() -> Self {
        Self {
            eps_list: [0.2, 0.1, 0.05, 0.02, 0.01].iter().map(|&x| T::of(x)).collect(),
            len_scale: T::of(1e4),
            len_max: 1_000_000,
            m_out: 2048,
            power_sizes: Vec::new(),
            power_iters: 10_000,
            power_tol: T::of(1e-10),
        }
    }
}

impl<T: Scalar> NormConfig<T> {
    pub fn len_for(&self, eps: T) -> usize {
        let m = (self.len_scale / eps).ceil().to_usize().unwrap_or(self.len_max);
        m.clamp(1, self.len_max)
    }
}

/// Upper bound from the Beta chain and certified epsilon-family lower
/// bounds for `‖H_μ‖ : ℓ^p_α → ℓ^p_β`.
pub fn norm_experiment<T: Scalar>(mu: &Measure<T>, w: &WeightParams<T>, cfg: &NormConfig<T>) -> Result<ExperimentReport> {
    let start = Instant::now();
    if cfg.eps_list.is_empty() || cfg.eps_list.iter().any(|e| !(*e > T::zero())) {
        return Err(Error::Config("eps_list must be nonempty with positive entries".into()));
    }
    let schedule: Vec<FamilyPoint<T>> =
        cfg.eps_list.iter().map(|&eps| FamilyPoint::Epsilon { eps, len: cfg.len_for(eps) }).collect();
    let m_in = schedule
        .iter()
        .map(|p| match p {
            FamilyPoint::Epsilon { len, .. } => *len,
            _ => unreachable!(),
        })
        .max()
        .expect("nonempty");
    let trunc = Truncation { m_in, m_out: cfg.m_out, tail_policy: TailPolicy::Bound };
    let ctx = OperatorContext::new(mu.clone(), *w, trunc)?;
    let est = lower_bound_family(&ctx, &schedule)?;
    let kernel = certified_kernel_constant(&ctx);

    let mut report = ExperimentReport::new(
        "norm",
        json!({
            "measure": mu.label(),
            "p": w.p.as_f64(), "alpha": w.alpha.as_f64(), "beta": w.beta.as_f64(),
            "eps_list": cfg.eps_list.iter().map(|e| e.as_f64()).collect::<Vec<_>>(),
            "len_scale": cfg.len_scale.as_f64(), "len_max": cfg.len_max, "m_out": cfg.m_out,
            "power_sizes": cfg.power_sizes,
        }),
    );
    report.trace = est
        .trace
        .iter()
        .map(|t| TraceRow { parameter: t.parameter.as_f64(), estimate: t.estimate.as_f64(), slack: t.slack().as_f64() })
        .collect();
    let mut lower = est.lower.as_f64();
    let mut power = serde_json::Value::Null;
    if !cfg.power_sizes.is_empty() {
        let size_max = *cfg.power_sizes.iter().max().expect("nonempty");
        let pctx = OperatorContext::new(
            mu.clone(),
            *w,
            Truncation { m_in: size_max, m_out: size_max, tail_policy: TailPolicy::Ignore },
        )?;
        let pe = power_iteration_trace(&pctx, &cfg.power_sizes, cfg.power_iters, cfg.power_tol)?;
        lower = lower.max(pe.lower.as_f64());
        power = json!({
            "lower": pe.lower.as_f64(),
            "trace": pe.trace.iter().map(|t| json!({"size": t.parameter.as_f64(), "estimate": t.estimate.as_f64(), "upper": t.upper.as_f64()})).collect::<Vec<_>>(),
        });
    }
    report.lower = Some(lower);
    report.upper = finite(est.upper.as_f64());
    report.slack = est.trace.last().and_then(|t| finite(t.slack().as_f64()));
    let pts: Vec<(T, T)> = est.trace.iter().map(|t| (t.parameter, t.estimate)).collect();
    report.extrapolated = extrapolate_to_zero(&pts).map(|x| x.as_f64());
    report.details = json!({
        "method_lower": est.method_lower.name(),
        "method_upper": "beta_bound",
        "kernel_constant": finite(kernel.as_f64()),
        "lengths": schedule.iter().map(|p| match p { FamilyPoint::Epsilon { len, .. } => *len, _ => 0 }).collect::<Vec<_>>(),
        "truncated_ratios": est.trace.iter().map(|t| t.truncated.as_f64()).collect::<Vec<_>>(),
        "ratio_upper": est.trace.iter().map(|t| finite(t.upper.as_f64())).collect::<Vec<_>>(),
        "power_iteration": power,
        "ratio_to_upper": finite(lower / est.upper.as_f64()),
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
