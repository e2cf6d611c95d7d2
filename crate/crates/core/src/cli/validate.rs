//! Precondition checks on a config before any computation starts.

use serde::Serialize;

use super::config::{Command, ExperimentConfig};
use crate::error::Error;
use crate::measures::{Density, Measure};
use crate::seqspace::WeightParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    /// Malformed or inconsistent configuration (exit status 2).
    Config,
    /// A mathematical precondition of the owning module fails (exit status 3).
    Precondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub module: &'static str,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Config => "config",
            DiagnosticKind::Precondition => "precondition",
        };
        write!(f, "[{kind}] {}.{}: {}", self.module, self.field, self.message)
    }
}

/// Collects diagnostics, then converts them into the error `run` raises.
struct Diags(Vec<Diagnostic>);

impl Diags {
    fn config(&mut self, module: &'static str, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { kind: DiagnosticKind::Config, module, field: field.into(), message: message.into() });
    }

    fn pre(&mut self, module: &'static str, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            kind: DiagnosticKind::Precondition,
            module,
            field: field.into(),
            message: message.into(),
        });
    }

    fn from_error(&mut self, module: &'static str, field: &str, e: Error) {
        match e {
            Error::Config(m) => self.config(module, field, m),
            other => self.pre(module, field, other.to_string()),
        }
    }
}

/// Turns a nonempty diagnostic list into the matching error class.
pub fn diagnostics_error(diags: &[Diagnostic]) -> Option<Error> {
    if diags.is_empty() {
        return None;
    }
    let text = diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
    Some(if diags.iter().any(|d| d.kind == DiagnosticKind::Config) {
        Error::Config(text)
    } else {
        Error::Hypothesis(text)
    })
}

fn decreasing_positive(d: &mut Diags, module: &'static str, field: &str, xs: &[f64]) {
    if xs.is_empty() {
        d.config(module, field, "must be nonempty");
    }
    if xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        d.config(module, field, "entries must be positive and finite");
    }
    if xs.windows(2).any(|w| w[1] >= w[0]) {
        d.config(module, field, "entries must be strictly decreasing");
    }
}

fn hypothesis(d: &mut Diags, w: &WeightParams<f64>) {
    if !w.in_hypothesis_range() {
        d.pre(
            "seqspace",
            "weights",
            format!(
                "outside the hypothesis range -1 < alpha, beta < p-1 (p={}, alpha={}, beta={}, p-1={})",
                w.p,
                w.alpha,
                w.beta,
                w.p - 1.0
            ),
        );
    }
}

/// Every violated precondition of `cfg`; empty iff `run` passes validation.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Diags(Vec::new());
    let cmd = cfg.command;
    let p = &cfg.params;

    let allowed = cmd.param_keys();
    for key in p.set_keys() {
        if !allowed.contains(&key) {
            d.config("cli", format!("params.{key}"), format!("not used by the '{}' command", cmd.name()));
        }
    }

    let needs_measure = matches!(
        cmd,
        Command::Moments | Command::Carleson | Command::Apply | Command::Norm | Command::Sharpness
    );
    let measure: Option<Measure<f64>> = match &cfg.measure {
        None if needs_measure => {
            d.config("cli", "measure", format!("the '{}' command needs a measure", cmd.name()));
            None
        }
        None => None,
        Some(spec) => match spec.build() {
            Ok(m) => Some(m),
            Err(e) => {
                d.from_error("measures", "measure", e);
                None
            }
        },
    };
    match cmd {
        Command::Divergence => {
            if let Some(m) = &measure {
                let lebesgue = m.atoms().is_empty() && m.density() == Some(&Density::Constant { c: 1.0 });
                if !lebesgue {
                    d.config("normest", "measure", "the divergence experiment uses the Lebesgue measure only");
                }
            }
        }
        Command::Identities => {
            if cfg.measure.is_some() {
                d.config("cli", "measure", "not used by the 'identities' command");
            }
        }
        _ => {}
    }

    let needs_weights = matches!(cmd, Command::Apply | Command::Norm | Command::Sharpness | Command::Divergence);
    let weights: Option<WeightParams<f64>> = match &cfg.weights {
        None if needs_weights => {
            d.config("cli", "weights", format!("the '{}' command needs weights", cmd.name()));
            None
        }
        None => None,
        Some(ws) => match WeightParams::with_beta(ws.p, ws.alpha, ws.beta.unwrap_or(ws.alpha)) {
            Ok(w) => Some(w),
            Err(e) => {
                d.from_error("seqspace", "weights", e);
                None
            }
        },
    };
    if cmd == Command::Identities && cfg.weights.is_some() {
        d.config("cli", "weights", "not used by the 'identities' command");
    }

    match cmd {
        Command::Moments => {
            if p.n_max == Some(0) {
                d.pre("measures", "params.n_max", "must be >= 1");
            }
        }
        Command::Carleson => {
            if let Some(s) = p.s {
                if !(s.is_finite() && s > 0.0) {
                    d.pre("measures", "params.s", format!("must be positive, got {s}"));
                }
            }
            if p.grid_size.is_some_and(|g| g < 2) {
                d.pre("measures", "params.grid_size", "must be >= 2");
            }
            if p.n_max == Some(0) {
                d.pre("measures", "params.n_max", "must be >= 1");
            }
        }
        Command::Apply => validate_apply(&mut d, cfg, weights.as_ref()),
        Command::Norm => {
            if let Some(w) = &weights {
                hypothesis(&mut d, w);
                if p.power_sizes.is_some() && !(w.p == 2.0 && w.alpha == w.beta) {
                    d.pre("normest", "params.power_sizes", "power iteration needs p = 2 and alpha = beta");
                }
            }
            if let Some(e) = &p.eps_list {
                decreasing_positive(&mut d, "normest", "params.eps_list", e);
            }
            if p.len_scale.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                d.config("normest", "params.len_scale", "must be positive");
            }
            if p.len_max.is_some_and(|x| x == 0 || x > crate::seqspace::MAX_SEQ_LEN) {
                d.config("normest", "params.len_max", "must lie in [1, 2^27]");
            }
            if p.m_out == Some(0) {
                d.config("normest", "params.m_out", "must be >= 1");
            }
            if let Some(sizes) = &p.power_sizes {
                if sizes.is_empty() || sizes.contains(&0) {
                    d.config("normest", "params.power_sizes", "sizes must be nonempty and >= 1");
                }
            }
            if p.power_tol.is_some_and(|t| !(t > 0.0 && t < 1.0)) {
                d.config("normest", "params.power_tol", "must lie in (0, 1)");
            }
            if p.power_iters == Some(0) {
                d.config("normest", "params.power_iters", "must be >= 1");
            }
        }
        Command::Sharpness => validate_sharpness(&mut d, cfg, measure.as_ref(), weights.as_ref()),
        Command::Divergence => {
            if let Some(w) = &weights {
                if !(w.beta > w.alpha) {
                    d.config("normest", "weights.beta", format!("needs beta > alpha, got {} <= {}", w.beta, w.alpha));
                }
                if !(w.alpha > -1.0) {
                    d.pre("normest", "weights.alpha", format!("needs alpha > -1, got {}", w.alpha));
                }
            }
            if p.eps0.is_some_and(|e| !(e.is_finite() && e > 0.0)) {
                d.config("normest", "params.eps0", "must be positive");
            }
            if p.m0 == Some(0) || p.growth == Some(0) {
                d.config("normest", "params", "m0 and growth must be >= 1");
            }
            if p.empirical_cap.is_some_and(|c| c < 2) {
                d.config("normest", "params.empirical_cap", "must be >= 2");
            }
            let cfg_d = super::commands::divergence_config(p);
            if let Err(e) = cfg_d.schedule() {
                d.from_error("normest", "params", e);
            }
        }
        Command::Identities => {}
    }
    d.0
}

fn validate_apply(d: &mut Diags, cfg: &ExperimentConfig, w: Option<&WeightParams<f64>>) {
    let p = &cfg.params;
    let family = p.family.as_deref().unwrap_or("epsilon");
    let param = p.family_param;
    let len = p.len.unwrap_or(4096);
    match family {
        "epsilon" | "tau" => {
            if param.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                d.pre("seqspace", "params.family_param", format!("{family} must be positive"));
            }
        }
        "b" => {
            let b = param.unwrap_or(0.9);
            if !(b > 0.0 && b < 1.0) {
                d.pre("seqspace", "params.family_param", "b must lie in (0, 1)");
            } else if let Some(w) = w {
                let needed = crate::seqspace::b_family_length(w.p, b);
                if needed > crate::seqspace::MAX_SEQ_LEN as f64 {
                    d.pre("seqspace", "params.family_param", format!("b = {b} needs {needed} terms"));
                }
            }
        }
        "unit" => {
            let k = param.unwrap_or(1.0);
            if !(k >= 1.0 && k.fract() == 0.0 && k <= len as f64) {
                d.pre("seqspace", "params.family_param", "unit index must be an integer in [1, len]");
            }
        }
        other => d.config("cli", "params.family", format!("unknown family '{other}'; expected epsilon, b, tau or unit")),
    }
    if family == "tau" {
        let n = p.n_cutoff.unwrap_or(1);
        if n == 0 || len <= n {
            d.pre("seqspace", "params.n_cutoff", "requires 1 <= n_cutoff < len");
        }
    } else if p.n_cutoff.is_some() {
        d.config("cli", "params.n_cutoff", "only used by the tau family");
    }
    if len == 0 || len > crate::seqspace::MAX_SEQ_LEN {
        d.pre("seqspace", "params.len", "must lie in [1, 2^27]");
    }
    if p.m_out == Some(0) {
        d.config("operator", "params.m_out", "must be >= 1");
    }
    match p.tail_policy.as_deref() {
        None | Some("bound") | Some("ignore") => {}
        Some(other) => d.config("operator", "params.tail_policy", format!("unknown policy '{other}'; expected bound or ignore")),
    }
}

fn validate_sharpness(
    d: &mut Diags,
    cfg: &ExperimentConfig,
    measure: Option<&Measure<f64>>,
    w: Option<&WeightParams<f64>>,
) {
    let p = &cfg.params;
    let defaults = crate::normest::SharpnessConfig::<f64>::default();
    let eps_list = p.eps_list.clone().unwrap_or(defaults.eps_list);
    let tau_list = p.tau_list.clone().unwrap_or(defaults.tau_list);
    decreasing_positive(d, "normest", "params.eps_list", &eps_list);
    decreasing_positive(d, "normest", "params.tau_list", &tau_list);
    if let Some(w) = w {
        hypothesis(d, w);
        if w.alpha != w.beta {
            d.pre("normest", "weights.beta", "the sharpness experiment needs alpha = beta");
        }
        let tau_max = w.p - 1.0 - w.alpha;
        for &tau in &tau_list {
            if !(tau > 0.0 && tau < tau_max) {
                d.config(
                    "normest",
                    "params.tau_list",
                    format!("tau = {tau} outside (0, p-1-alpha) = (0, {tau_max}): the D integral diverges"),
                );
            }
        }
    }
    let mut sup = None;
    if let Some(m) = measure {
        match m.density() {
            _ if !m.atoms().is_empty() => d.pre("normest", "measure", "sharpness needs a pure density"),
            None => d.pre("normest", "measure", "sharpness needs a density"),
            Some(g) => {
                if !g.is_nondecreasing() {
                    d.pre("normest", "measure", "density must be nondecreasing");
                }
                match g.sup_norm() {
                    Some(s) if s > 0.0 => sup = Some(s),
                    _ => d.pre("normest", "measure", "density must be bounded with positive sup norm"),
                }
            }
        }
    }
    if let Some(s) = sup {
        for &eps in &eps_list {
            if !(eps > 0.0 && eps < s) {
                d.config("normest", "params.eps_list", format!("eps = {eps} outside (0, |g|_inf) = (0, {s})"));
            }
        }
    }
    if p.j_eps.is_some_and(|j| !(j > 0.0 && j < 1.0)) {
        d.config("normest", "params.j_eps", "must lie in (0, 1)");
    }
    let m = p.m.unwrap_or(defaults.m);
    if p.n_cutoff == Some(0) {
        d.config("normest", "params.n_cutoff", "must be >= 1");
    }
    if p.n_cutoff.is_some_and(|n| n >= m) {
        d.config("normest", "params.n_cutoff", "must be below params.m");
    }
    if m < 2 || m > crate::seqspace::MAX_SEQ_LEN {
        d.config("normest", "params.m", "must lie in [2, 2^27]");
    }
    if p.m_out == Some(0) {
        d.config("normest", "params.m_out", "must be >= 1");
    }
}
