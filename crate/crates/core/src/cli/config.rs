//! Declarative experiment configuration and its strict schema.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Atom, Density, Measure, PolyPiece};
use crate::report::ReportFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Moments,
    Carleson,
    Apply,
    Norm,
    Sharpness,
    Divergence,
    Identities,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Carleson => "carleson",
            Command::Apply => "apply",
            Command::Norm => "norm",
            Command::Sharpness => "sharpness",
            Command::Divergence => "divergence",
            Command::Identities => "identities",
        }
    }

    /// `params` keys this command reads.
    pub fn param_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Moments => &["n_max", "exponent"],
            Command::Carleson => &["s", "grid_size", "n_max"],
            Command::Apply => &["family", "family_param", "n_cutoff", "len", "m_out", "tail_policy"],
            Command::Norm => &["eps_list", "len_scale", "len_max", "m_out", "power_sizes", "power_iters", "power_tol"],
            Command::Sharpness => &["eps_list", "tau_list", "n_cutoff", "j_eps", "m", "m_out"],
            Command::Divergence => &["eps0", "m0", "growth", "steps", "empirical_cap"],
            Command::Identities => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    #[default]
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

/// Measure given either as a shorthand string or as a full descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Shorthand(String),
    Full(MeasureDescriptor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDescriptor {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub t: f64,
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Constant { c: f64 },
    Monomial { k: f64, #[serde(default = "one")] c: f64 },
    OneMinusTPower { s: f64, #[serde(default = "one")] c: f64 },
    PiecewisePoly { pieces: Vec<PieceSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<f64>,
}

impl DensitySpec {
    fn build(&self) -> Density<f64> {
        match self {
            DensitySpec::Constant { c } => Density::Constant { c: *c },
            DensitySpec::Monomial { k, c } => Density::Monomial { c: *c, k: *k },
            DensitySpec::OneMinusTPower { s, c } => Density::OneMinusTPower { c: *c, s: *s },
            DensitySpec::PiecewisePoly { pieces } => Density::PiecewisePoly {
                pieces: pieces
                    .iter()
                    .map(|p| PolyPiece { start: p.start, end: p.end, coeffs: p.coeffs.clone() })
                    .collect(),
            },
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Config(format!("measure shorthand: cannot parse {what} from '{s}'")))
}

/// Parses `lebesgue`, `dirac:T[:MASS]`, `const:C`, `monomial:K[:C]` and
/// `one-minus-t:S[:C]` (density `C (1−t)^(S−1)`).
pub fn parse_measure_shorthand(spec: &str) -> Result<Measure<f64>> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let arg = |i: usize, what: &str| -> Result<f64> {
        parts.get(i).map_or_else(|| Err(Error::Config(format!("measure '{spec}' is missing {what}"))), |s| parse_num(s, what))
    };
    let opt = |i: usize, what: &str| -> Result<f64> { if parts.len() > i { arg(i, what) } else { Ok(1.0) } };
    let max_parts = |n: usize| -> Result<()> {
        if parts.len() > n {
            Err(Error::Config(format!("measure '{spec}' has too many fields")))
        } else {
            Ok(())
        }
    };
    let m = match parts[0] {
        "lebesgue" => {
            max_parts(1)?;
            Measure::lebesgue()
        }
        "dirac" => {
            max_parts(3)?;
            Measure::new(vec![Atom { t: arg(1, "location")?, mass: opt(2, "mass")? }], None, spec)?
        }
        "const" => {
            max_parts(2)?;
            Measure::with_density(Density::Constant { c: arg(1, "constant")? }, spec)?
        }
        "monomial" => {
            max_parts(3)?;
            Measure::with_density(Density::Monomial { k: arg(1, "exponent")?, c: opt(2, "coefficient")? }, spec)?
        }
        "one-minus-t" => {
            max_parts(3)?;
            Measure::with_density(Density::OneMinusTPower { s: arg(1, "s")?, c: opt(2, "coefficient")? }, spec)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown measure '{other}'; expected lebesgue, dirac, const, monomial or one-minus-t"
            )))
        }
    };
    Ok(m)
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure<f64>> {
        match self {
            MeasureSpec::Shorthand(s) => parse_measure_shorthand(s),
            MeasureSpec::Full(d) => {
                let atoms = d.atoms.iter().map(|a| Atom { t: a.t, mass: a.mass }).collect();
                let label = d.label.clone().unwrap_or_else(|| "custom".to_string());
                Measure::new(atoms, d.density.as_ref().map(DensitySpec::build), label)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub p: f64,
    pub alpha: f64,
    /// Defaults to `alpha`.
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: FormatArg,
}

/// Per-command parameters. Every field is optional; each command reads the
/// subset listed by [`Command::param_keys`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Moment horizon.
    #[arg(long)]
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Decay exponent for the moment check (default 1+(beta-alpha)/p).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default)]
    pub exponent: Option<f64>,
    /// Carleson exponent (default 1+(beta-alpha)/p).
    #[arg(long)]
    #[serde(default)]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub grid_size: Option<usize>,
    /// Test sequence for `apply`: epsilon, b, tau or unit.
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    /// Family parameter: eps, b, tau, or the unit index.
    #[arg(long)]
    #[serde(default)]
    pub family_param: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub n_cutoff: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub len: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub m_out: Option<usize>,
    /// bound or ignore.
    #[arg(long)]
    #[serde(default)]
    pub tail_policy: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub eps_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub tau_list: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(default)]
    pub len_scale: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub len_max: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub power_sizes: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(default)]
    pub power_iters: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub power_tol: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub j_eps: Option<f64>,
    /// Sequence length for the sharpness experiment.
    #[arg(long)]
    #[serde(default)]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub eps0: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub m0: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub growth: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub steps: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub empirical_cap: Option<usize>,
}

macro_rules! param_fields {
    ($mac:ident) => {
        $mac!(
            n_max, exponent, s, grid_size, family, family_param, n_cutoff, len, m_out, tail_policy, eps_list,
            tau_list, len_scale, len_max, power_sizes, power_iters, power_tol, j_eps, m, eps0, m0, growth, steps,
            empirical_cap
        )
    };
}

impl Params {
    /// Fields of `other` that are set replace those of `self`.
    pub fn merge(&mut self, other: Params) {
        macro_rules! merge {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        param_fields!(merge);
    }

    /// Names of the fields that are set.
    pub fn set_keys(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! keys {
            ($($f:ident),*) => { $( if self.$f.is_some() { out.push(stringify!($f)); } )* };
        }
        param_fields!(keys);
        out
    }
}

/// One experiment: what to run, on which measure and weights, and where to
/// write the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub weights: Option<WeightsSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            measure: None,
            weights: None,
            params: Params::default(),
            output: OutputSpec::default(),
            seed: 0,
        }
    }

    /// Parses TOML when the extension is `.toml`, JSON otherwise.
    pub fn from_str_with_ext(text: &str, ext: Option<&str>) -> Result<Self> {
        if ext == Some("toml") {
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML config: {e}")))
        } else {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_str_with_ext(&text, path.extension().and_then(|e| e.to_str()))
    }
}
