//! The sharp-constant lower-bound chain for densities `g`: the cutoffs
//! `j_ε` and `N(ε)`, the quantities `D`, `E`, `F`, the analytic floor and
//! the experiment that compares the floor against empirical ratios.

use std::time::Instant;

use serde_json::json;

use super::{context_upper_bound, extrapolate_to_zero, finite};
use crate::error::{Error, Result};
use crate::measures::{Density, Measure};
use crate::operator::{ratio, OperatorContext, TailPolicy, Truncation};
use crate::quad::{integrate, QuadOptions};
use crate::report::{ExperimentReport, TraceRow};
use crate::scalar::{c, cn, Scalar};
use crate::seqspace::{make_tau_family, WeightParams};
use crate::specfun::pi_csc;

/// Number of intervals of the `j_ε` search grid `t_k = 1 − (1 − k/K)²`.
pub const J_EPS_GRID: usize = 1 << 16;

fn gamma_exponent<T: Scalar>(w: &WeightParams<T>, tau: T, op: &'static str) -> Result<T> {
    let g = (T::one() + w.alpha + tau) / w.p;
    if !(g > T::zero() && g < T::one()) || !(tau >= T::zero()) {
        return Err(Error::domain(op, format!("need 0 < (1+alpha+tau)/p < 1 and tau >= 0, got {g}")));
    }
    Ok(g)
}

/// `D(τ) = ∫_0^∞ t^(−γ)/(1+t) dt = π csc(πγ)` with `γ = (1+α+τ)/p`.
pub fn dpa<T: Scalar>(w: &WeightParams<T>, tau: T) -> Result<T> {
    pi_csc(gamma_exponent(w, tau, "dpa")?)
}

/// `∫_0^X t^(−γ)/(1+t) dt` by quadrature in `s = t^(1−γ)`, which removes
/// the endpoint singularity.
pub(crate) fn truncated_kernel_integral<T: Scalar>(gamma: T, x: T) -> Result<T> {
    let one = T::one();
    let k = one - gamma;
    let inv = k.recip();
    let s_max = x.powf(k);
    let opts = QuadOptions { abs_tol: c(1e-15), rel_tol: c(1e-12), ..QuadOptions::default() };
    Ok(integrate(|s: T| inv / (one + s.powf(inv)), T::zero(), s_max, &[], opts)?.value)
}

/// `E(τ, m)` together with its closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaValue<T> {
    pub value: T,
    /// `(p/(p−1−α−τ)) ((N+1)/m)^((p−1−α−τ)/p)`.
    pub bound: T,
}

impl<T: Scalar> EpaValue<T> {
    pub fn within_bound(&self) -> bool {
        self.value <= self.bound * (T::one() + c(1e-12))
    }
}

/// `E(τ, m) = ∫_0^((N+1)/m) t^(−γ)/(1+t) dt`.
pub fn epa<T: Scalar>(w: &WeightParams<T>, tau: T, m: usize, n_cutoff: usize) -> Result<EpaValue<T>> {
    let g = gamma_exponent(w, tau, "epa")?;
    if m == 0 || n_cutoff == 0 {
        return Err(Error::domain("epa", "m and N must be >= 1"));
    }
    let x = cn::<T>(n_cutoff + 1) / cn::<T>(m);
    let value = truncated_kernel_integral(g, x)?;
    let k = T::one() - g;
    let bound = k.recip() * x.powf(k);
    Ok(EpaValue { value, bound })
}

/// `F(N, τ) = p³ (N+1)^(−τ) / (D(τ) (p−1−α−τ)(pτ+p−1−α−τ))`.
pub fn fpa<T: Scalar>(w: &WeightParams<T>, n_cutoff: usize, tau: T) -> Result<T> {
    let d = dpa(w, tau)?;
    let p = w.p;
    let r = p - T::one() - w.alpha - tau;
    Ok(p.powi(3) * cn::<T>(n_cutoff + 1).powf(-tau) / d / (r * (p * tau + r)))
}

/// `(‖g‖ − ε) D(τ) (N/(N+1))^(τ/p) max(0, 1 − τ (N+1)^τ F(N, τ))^(1/p)`.
pub fn floor_bound<T: Scalar>(g_sup: T, eps: T, w: &WeightParams<T>, tau: T, n_cutoff: usize) -> Result<T> {
    let d = dpa(w, tau)?;
    let f = fpa(w, n_cutoff, tau)?;
    let nf = cn::<T>(n_cutoff);
    let inner = (T::one() - tau * (nf + T::one()).powf(tau) * f).max(T::zero());
    Ok((g_sup - eps).max(T::zero()) * d * (nf / (nf + T::one())).powf(tau / w.p) * inner.powf(w.p.recip()))
}

fn grid_point<T: Scalar>(k: usize) -> T {
    let u = T::one() - cn::<T>(k) / cn::<T>(J_EPS_GRID);
    T::one() - u * u
}

/// Smallest grid point `t_k ∈ (0, 1)` with `g(t_k) >= ‖g‖ − ε/2`, found by
/// bisection (`g` nondecreasing).
pub fn j_eps<T: Scalar>(g: &Density<T>, eps: T) -> Result<T> {
    let sup = g.sup_norm().ok_or_else(|| Error::domain("j_eps", "density is unbounded"))?;
    let target = sup - eps / c(2.0);
    let ok = |k: usize| g.eval(grid_point::<T>(k)) >= target;
    let (mut lo, mut hi) = (1usize, J_EPS_GRID - 1);
    if !ok(hi) {
        return Err(Error::PrecisionCap(format!("no grid point reaches g >= {target}")));
    }
    if ok(lo) {
        return Ok(grid_point(lo));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(grid_point(hi))
}

/// Smallest `n >= 1` with `(1 + ε/(2(‖g‖−ε))) (1 − j^(n+1)) >= 1`.
pub fn cutoff_n<T: Scalar>(g_sup: T, eps: T, j: T) -> Result<usize> {
    if !(eps > T::zero() && eps < g_sup) || !(j > T::zero() && j < T::one()) {
        return Err(Error::domain("cutoff_n", format!("need 0 < eps < |g| and 0 < j < 1, got eps={eps}, j={j}")));
    }
    let factor = T::one() + eps / (c::<T>(2.0) * (g_sup - eps));
    let holds = |n: usize| factor * (T::one() - j.powi(n as i32 + 1)) >= T::one();
    // j^(n+1) <= r/(1+r) gives the starting estimate.
    let r = factor - T::one();
    let est = ((r / factor).ln() / j.ln() - T::one()).ceil().to_usize().unwrap_or(1).max(1);
    let mut n = est.saturating_sub(2).max(1);
    while !holds(n) {
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessConfig<T> {
    /// Decreasing ε values in `(0, ‖g‖)`.
    pub eps_list: Vec<T>,
    /// Decreasing τ values in `(0, p−1−α)`.
    pub tau_list: Vec<T>,
    /// Fixed cutoff; derived from ε when `None`.
    pub n_cutoff: Option<usize>,
    /// Fixed `j_ε`; located on the grid when `None`.
    pub j_eps: Option<T>,
    /// Truncation length of the τ-family sequences.
    pub m: usize,
    pub m_out: usize,
}

impl<T: Scalar> Default for SharpnessConfig<T> {
    fn default() -> Self {
        Self {
            eps_list: [0.1, 0.05, 0.02, 0.01].iter().map(|&x| T::of(x)).collect(),
            tau_list: [0.2, 0.1, 0.05, 0.02].iter().map(|&x| T::of(x)).collect(),
            n_cutoff: None,
            j_eps: None,
            m: 32_768,
            m_out: 1024,
        }
    }
}

impl<T: Scalar> SharpnessConfig<T> {
    /// Checks the schedules against `‖g‖` and the weights.
    pub fn validate(&self, g_sup: T, w: &WeightParams<T>) -> Result<()> {
        let tau_max = w.p - T::one() - w.alpha;
        if self.tau_list.is_empty() || self.eps_list.is_empty() {
            return Err(Error::Config("eps_list and tau_list must be nonempty".into()));
        }
        for &tau in &self.tau_list {
            if !(tau > T::zero() && tau < tau_max) {
                return Err(Error::Config(format!(
                    "tau = {tau} outside (0, p-1-alpha) = (0, {tau_max}): the D integral diverges"
                )));
            }
        }
        for &eps in &self.eps_list {
            if !(eps > T::zero() && eps < g_sup) {
                return Err(Error::Config(format!("eps = {eps} outside (0, |g|_inf) = (0, {g_sup})")));
            }
        }
        if let Some(j) = self.j_eps {
            if !(j > T::zero() && j < T::one()) {
                return Err(Error::Config(format!("j_eps = {j} outside (0, 1)")));
            }
        }
        if self.n_cutoff == Some(0) {
            return Err(Error::Config("n_cutoff must be >= 1".into()));
        }
        Ok(())
    }
}

/// One `(ε, τ)` cell of the sharpness experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessCell<T> {
    pub eps: T,
    pub tau: T,
    pub n_cutoff: usize,
    pub floor: T,
    pub empirical_lower: T,
    pub empirical_upper: T,
}

fn density_of<T: Scalar>(g: &Measure<T>) -> Result<(&Density<T>, T)> {
    if !g.atoms().is_empty() {
        return Err(Error::domain("sharpness_experiment", "measure must be a pure density"));
    }
    let d = g.density().ok_or_else(|| Error::domain("sharpness_experiment", "measure has no density"))?;
    if !d.is_nondecreasing() {
        return Err(Error::domain("sharpness_experiment", "density must be nondecreasing"));
    }
    let sup = d.sup_norm().ok_or_else(|| Error::domain("sharpness_experiment", "density must be bounded"))?;
    if !(sup > T::zero()) {
        return Err(Error::domain("sharpness_experiment", "density must have positive sup norm"));
    }
    Ok((d, sup))
}

/// Runs every `(ε, τ)` cell and returns the cells with the operator upper
/// bound and the sup norm.
pub fn sharpness_cells<T: Scalar>(
    g: &Measure<T>,
    w: &WeightParams<T>,
    cfg: &SharpnessConfig<T>,
) -> Result<(Vec<SharpnessCell<T>>, T, T)> {
    let (d, sup) = density_of(g)?;
    if w.alpha != w.beta {
        return Err(Error::Hypothesis("sharpness experiment needs alpha = beta".into()));
    }
    w.check_hypothesis()?;
    cfg.validate(sup, w)?;
    let trunc = Truncation { m_in: cfg.m, m_out: cfg.m_out, tail_policy: TailPolicy::Bound };
    let ctx = OperatorContext::new(g.clone(), *w, trunc)?;
    let upper = context_upper_bound(&ctx);
    let mut cells = Vec::new();
    for &eps in &cfg.eps_list {
        let n_cutoff = match cfg.n_cutoff {
            Some(n) => n,
            None => {
                let j = match cfg.j_eps {
                    Some(j) => j,
                    None => j_eps(d, eps)?,
                };
                cutoff_n(sup, eps, j)?
            }
        };
        if n_cutoff >= cfg.m {
            return Err(Error::Config(format!("cutoff N = {n_cutoff} must be below the length M = {}", cfg.m)));
        }
        for &tau in &cfg.tau_list {
            let floor = floor_bound(sup, eps, w, tau, n_cutoff)?;
            let a = make_tau_family(w, tau, n_cutoff, cfg.m)?;
            let r = ratio(&ctx, &a)?;
            cells.push(SharpnessCell { eps, tau, n_cutoff, floor, empirical_lower: r.lower, empirical_upper: r.upper });
        }
    }
    Ok((cells, upper, sup))
}

/// Floors and empirical τ-family ratios over the `(ε, τ)` grid, with the
/// best certified lower bound against the Beta upper bound.
pub fn sharpness_experiment<T: Scalar>(
    g: &Measure<T>,
    w: &WeightParams<T>,
    cfg: &SharpnessConfig<T>,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let (cells, upper, sup) = sharpness_cells(g, w, cfg)?;
    let sharp = sup * pi_csc((T::one() + w.alpha) / w.p)?;
    let mut report = ExperimentReport::new(
        "sharpness",
        json!({
            "measure": g.label(),
            "p": w.p.as_f64(), "alpha": w.alpha.as_f64(),
            "eps_list": cfg.eps_list.iter().map(|e| e.as_f64()).collect::<Vec<_>>(),
            "tau_list": cfg.tau_list.iter().map(|e| e.as_f64()).collect::<Vec<_>>(),
            "n_cutoff": cfg.n_cutoff, "j_eps": cfg.j_eps.map(|j| j.as_f64()),
            "m": cfg.m, "m_out": cfg.m_out,
        }),
    );
    // Trace: floors along τ at the smallest ε.
    let last_eps = *cfg.eps_list.last().expect("validated nonempty");
    let last: Vec<&SharpnessCell<T>> = cells.iter().filter(|c| c.eps == last_eps).collect();
    report.trace = last
        .iter()
        .map(|c| TraceRow {
            parameter: c.tau.as_f64(),
            estimate: c.floor.as_f64(),
            slack: (c.empirical_upper - c.empirical_lower).as_f64(),
        })
        .collect();
    let best_floor = cells.iter().map(|c| c.floor).fold(T::zero(), T::max);
    let best_emp = cells.iter().map(|c| c.empirical_lower).fold(T::zero(), T::max);
    report.lower = Some(best_floor.max(best_emp).as_f64());
    report.upper = finite(upper.as_f64());
    report.slack = last.last().and_then(|c| finite((c.empirical_upper - c.empirical_lower).as_f64()));
    let pts: Vec<(T, T)> = last.iter().map(|c| (c.tau, c.floor)).collect();
    report.extrapolated = extrapolate_to_zero(&pts).map(|x| x.as_f64());
    let floor_violations = cells
        .iter()
        .filter(|c| c.floor > c.empirical_upper || c.floor > upper || c.empirical_lower > upper)
        .count();
    report.details = json!({
        "sup_norm": sup.as_f64(),
        "sharp_constant": sharp.as_f64(),
        "extrapolation": "linear in tau through the last two floors; not a certified bound",
        "floor_limits": cfg.eps_list.iter().map(|&e| json!({
            "eps": e.as_f64(),
            "limit": ((sup - e) * sharp / sup).as_f64(),
        })).collect::<Vec<_>>(),
        "cells": cells.iter().map(|c| json!({
            "eps": c.eps.as_f64(), "tau": c.tau.as_f64(), "n_cutoff": c.n_cutoff,
            "floor": c.floor.as_f64(),
            "empirical_lower": c.empirical_lower.as_f64(),
            "empirical_upper": finite(c.empirical_upper.as_f64()),
        })).collect::<Vec<_>>(),
        "floor_violations": floor_violations,
        "lower_over_sharp": (report.lower.unwrap_or(0.0) / sharp.as_f64()),
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{beta, inc_beta};
    use std::f64::consts::PI;

    fn w2() -> WeightParams<f64> {
        WeightParams::new(2.0, 0.0).unwrap()
    }

    #[test]
    fn dpa_values_and_quadrature() {
        let w = w2();
        assert!((dpa(&w, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!((dpa(&w, 0.5).unwrap() - PI * 2f64.sqrt()).abs() < 1e-12);
        assert!(dpa(&w, 1.0).is_err());
        for &tau in &[0.02, 0.1, 0.3, 0.7] {
            let g: f64 = (1.0 + tau) / 2.0;
            // (0,1) ∪ (1,∞); the second piece maps to (0,1) under t ↦ 1/t.
            let a = truncated_kernel_integral(g, 1.0).unwrap();
            let b = truncated_kernel_integral(1.0 - g, 1.0).unwrap();
            assert!((a + b - dpa(&w, tau).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn epa_matches_incomplete_beta_and_bound() {
        let w = w2();
        let e = epa(&w, 0.1, 100, 10).unwrap();
        assert!(e.within_bound());
        assert!((e.bound - (2.0 / 0.9) * (11.0f64 / 100.0).powf(0.45)).abs() < 1e-14);
        let g = 0.55;
        let x = 0.11;
        let closed = beta(1.0 - g, g).unwrap() * inc_beta(1.0 - g, g, x / (1.0 + x)).unwrap();
        assert!((e.value - closed).abs() < 1e-10 * closed);
        let far = epa(&w, 0.1, 10_000_000, 10).unwrap();
        assert!(far.value < 1e-2);
    }

    #[test]
    fn fpa_dominates_finite_sum() {
        let w = w2();
        let (tau, n) = (0.1, 100usize);
        let f = fpa(&w, n, tau).unwrap();
        let d = dpa(&w, tau).unwrap();
        let mut s = 0.0;
        for m in (n + 1)..=20_000 {
            s += (m as f64).powf(-1.0 - tau) * 2.0 * epa(&w, tau, m, n).unwrap().value / d;
        }
        assert!(s <= f, "{s} > {f}");
        let big = fpa(&w, 1_000_000, tau).unwrap();
        assert!(big < f);
    }

    #[test]
    fn cutoffs() {
        let one = Density::Constant { c: 1.0 };
        let j = j_eps(&one, 0.1).unwrap();
        assert!(j > 0.0 && j < 1e-4);
        assert_eq!(cutoff_n(1.0, 0.1, j).unwrap(), 1);
        let lin = Density::Monomial { c: 1.0, k: 1.0 };
        let j: f64 = j_eps(&lin, 0.1).unwrap();
        assert!(j >= 0.95 && j < 0.9501, "{j}");
        let n = cutoff_n(1.0, 0.1, j).unwrap();
        let r: f64 = 0.1 / 1.8;
        assert!((1.0 + r) * (1.0 - j.powi(n as i32 + 1)) >= 1.0);
        assert!((1.0 + r) * (1.0 - j.powi(n as i32)) < 1.0);
    }

    #[test]
    fn floor_values() {
        let w = w2();
        let expect = [(0.2, 0.621), (0.1, 0.760), (0.05, 0.829), (0.02, 0.871)];
        for (tau, ratio) in expect {
            let f = floor_bound(1.0, 0.1, &w, tau, 1).unwrap();
            assert!((f / PI - ratio).abs() < 1e-3, "tau {tau}: {}", f / PI);
        }
    }

    #[test]
    fn tau_outside_range_is_config_error() {
        let cfg = SharpnessConfig { tau_list: vec![1.0], ..SharpnessConfig::default() };
        let r = sharpness_experiment(&Measure::lebesgue(), &w2(), &cfg);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
