//! Dispatch from a validated config to the owning module.

use std::time::Instant;

use serde_json::json;

use super::config::{Command, ExperimentConfig, Params};
use super::identities::identity_report;
use super::validate::{diagnostics_error, validate};
use crate::error::{Error, Result};
use crate::measures::{carleson_sup, moment_decay_check, moment_table, Measure, Verdict};
use crate::normest::{
    divergence_experiment, norm_experiment, sharpness_experiment, DivergenceConfig, NormConfig, SharpnessConfig,
};
use crate::operator::{apply, ratio, OperatorContext, TailPolicy, Truncation};
use crate::report::{ExperimentReport, TraceRow};
use crate::seqspace::{make_b_family, make_epsilon_family, make_tau_family, Seq, WeightParams};

pub(crate) fn divergence_config(p: &Params) -> DivergenceConfig<f64> {
    let d = DivergenceConfig::default();
    DivergenceConfig {
        eps0: p.eps0.unwrap_or(d.eps0),
        m0: p.m0.unwrap_or(d.m0),
        growth: p.growth.unwrap_or(d.growth),
        steps: p.steps.unwrap_or(d.steps),
        empirical_cap: p.empirical_cap.unwrap_or(d.empirical_cap),
    }
}

fn norm_config(p: &Params) -> NormConfig<f64> {
    let d = NormConfig::default();
    NormConfig {
        eps_list: p.eps_list.clone().unwrap_or(d.eps_list),
        len_scale: p.len_scale.unwrap_or(d.len_scale),
        len_max: p.len_max.unwrap_or(d.len_max),
        m_out: p.m_out.unwrap_or(d.m_out),
        power_sizes: p.power_sizes.clone().unwrap_or(d.power_sizes),
        power_iters: p.power_iters.unwrap_or(d.power_iters),
        power_tol: p.power_tol.unwrap_or(d.power_tol),
    }
}

fn sharpness_config(p: &Params) -> SharpnessConfig<f64> {
    let d = SharpnessConfig::default();
    SharpnessConfig {
        eps_list: p.eps_list.clone().unwrap_or(d.eps_list),
        tau_list: p.tau_list.clone().unwrap_or(d.tau_list),
        n_cutoff: p.n_cutoff.or(d.n_cutoff),
        j_eps: p.j_eps.or(d.j_eps),
        m: p.m.unwrap_or(d.m),
        m_out: p.m_out.unwrap_or(d.m_out),
    }
}

fn weights(cfg: &ExperimentConfig) -> Result<Option<WeightParams<f64>>> {
    cfg.weights.map(|w| WeightParams::with_beta(w.p, w.alpha, w.beta.unwrap_or(w.alpha))).transpose()
}

fn measure(cfg: &ExperimentConfig) -> Result<Measure<f64>> {
    cfg.measure.as_ref().ok_or_else(|| Error::Config("missing measure".into()))?.build()
}

fn required<T>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| Error::Config(format!("missing {what}")))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Bounded => "bounded",
        Verdict::UnboundedTrend => "unbounded_trend",
    }
}

/// Validates `cfg` and runs its command.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(e) = diagnostics_error(&validate(cfg)) {
        return Err(e);
    }
    let p = &cfg.params;
    match cfg.command {
        Command::Moments => run_moments(cfg),
        Command::Carleson => run_carleson(cfg),
        Command::Apply => run_apply(cfg),
        Command::Norm => norm_experiment(&measure(cfg)?, &required(weights(cfg)?, "weights")?, &norm_config(p)),
        Command::Sharpness => {
            sharpness_experiment(&measure(cfg)?, &required(weights(cfg)?, "weights")?, &sharpness_config(p))
        }
        Command::Divergence => divergence_experiment(&required(weights(cfg)?, "weights")?, &divergence_config(p)),
        Command::Identities => Ok(identity_report(cfg.seed)),
    }
}

fn run_moments(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mu = measure(cfg)?;
    let n_max = cfg.params.n_max.unwrap_or(1000);
    let exponent = cfg.params.exponent.unwrap_or(match weights(cfg)? {
        Some(w) => w.carleson_exponent(),
        None => 1.0,
    });
    let table = moment_table(&mu, n_max)?;
    let check = moment_decay_check(&table, exponent);
    let mut report = ExperimentReport::new(
        "moments",
        json!({ "measure": mu.label(), "n_max": n_max, "exponent": exponent }),
    );
    report.trace = (1..=n_max).map(|n| TraceRow { parameter: n as f64, estimate: table.get(n), slack: 0.0 }).collect();
    report.details = json!({
        "decay_fit": table.decay_fit().map(|f| json!({"exponent": f.exponent, "constant": f.constant})),
        "sup_constant": check.sup_constant,
        "first_half_sup": check.first_half_sup,
        "second_half_sup": check.second_half_sup,
        "growth_exponent": check.growth_exponent,
        "verdict": verdict_name(check.verdict),
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn run_carleson(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mu = measure(cfg)?;
    let s = cfg.params.s.unwrap_or(match weights(cfg)? {
        Some(w) => w.carleson_exponent(),
        None => 1.0,
    });
    let grid_size = cfg.params.grid_size.unwrap_or(257);
    let n_max = cfg.params.n_max.unwrap_or(10_000);
    let q = carleson_sup(&mu, s, grid_size)?;
    let table = moment_table(&mu, n_max)?;
    let check = moment_decay_check(&table, s);
    let mut report = ExperimentReport::new(
        "carleson",
        json!({ "measure": mu.label(), "s": s, "grid_size": grid_size, "n_max": n_max }),
    );
    report.trace = q
        .grid
        .iter()
        .zip(&q.ratios)
        .map(|(&t, &r)| TraceRow { parameter: t, estimate: r, slack: 0.0 })
        .collect();
    let carleson_verdict = if q.is_finite { Verdict::Bounded } else { Verdict::UnboundedTrend };
    report.details = json!({
        "sup_ratio": q.sup_ratio,
        "argmax_t": q.argmax_t,
        "growth_exponent": q.growth_exponent,
        "carleson_verdict": verdict_name(carleson_verdict),
        "moment_sup_constant": check.sup_constant,
        "moment_growth_exponent": check.growth_exponent,
        "moment_verdict": verdict_name(check.verdict),
        "verdicts_agree": carleson_verdict == check.verdict,
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn run_apply(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mu = measure(cfg)?;
    let w = required(weights(cfg)?, "weights")?;
    let p = &cfg.params;
    let family = p.family.as_deref().unwrap_or("epsilon");
    let len = p.len.unwrap_or(4096);
    let m_out = p.m_out.unwrap_or(1024);
    let tail_policy = match p.tail_policy.as_deref() {
        Some("ignore") => TailPolicy::Ignore,
        _ => TailPolicy::Bound,
    };
    let a: Seq<f64> = match family {
        "epsilon" => make_epsilon_family(&w, p.family_param.unwrap_or(0.1), len)?,
        "b" => make_b_family(&w, p.family_param.unwrap_or(0.9), len)?,
        "tau" => make_tau_family(&w, p.family_param.unwrap_or(0.1), p.n_cutoff.unwrap_or(1), len)?,
        "unit" => Seq::unit(p.family_param.unwrap_or(1.0) as usize, len)?,
        other => return Err(Error::Config(format!("unknown family '{other}'"))),
    };
    let ctx = OperatorContext::new(mu.clone(), w, Truncation { m_in: a.len(), m_out, tail_policy })?;
    let applied = apply(&ctx, &a)?;
    let r = ratio(&ctx, &a)?;
    let mut report = ExperimentReport::new(
        "apply",
        json!({
            "measure": mu.label(), "p": w.p, "alpha": w.alpha, "beta": w.beta,
            "family": family, "family_param": p.family_param, "n_cutoff": p.n_cutoff,
            "len": a.len(), "m_out": m_out,
            "tail_policy": if tail_policy == TailPolicy::Bound { "bound" } else { "ignore" },
        }),
    );
    report.trace = applied
        .output
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| TraceRow {
            parameter: (i + 1) as f64,
            estimate: v,
            slack: applied.tail_upper[i] - applied.tail_lower[i],
        })
        .collect();
    report.lower = Some(r.lower);
    report.upper = r.upper.is_finite().then_some(r.upper);
    report.slack = r.upper.is_finite().then_some(r.slack());
    report.details = json!({
        "ratio_truncated": r.truncated,
        "certified": r.certified,
        "trace_columns": "m, truncated output (H a)(m), width of the input-tail bracket",
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
