use std::io::{BufRead, Write};
use std::path::Path;

use super::{Density, Measure, GROWTH_EXPONENT_TOL};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::{c, cn, pow0, Scalar};
use crate::specfun::beta;
use crate::sum::NeumaierSum;

/// `μ[n] = ∫ t^(n−1) dμ(t)` for `n >= 1`, with `0^0 = 1`.
pub fn moment<T: Scalar>(mu: &Measure<T>, n: usize) -> T {
    assert!(n >= 1, "moment index starts at 1");
    let e = cn::<T>(n - 1);
    let atoms: T = mu.atoms().iter().map(|a| a.mass * pow0(a.t, e)).sum();
    atoms + mu.density().map_or(T::zero(), |d| d.moment(n))
}

/// Log-log least-squares fit `μ[n] ≈ constant · n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub exponent: T,
    pub constant: T,
}

/// Moments `μ[1..=n_max]` of one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T> {
    moments: Vec<T>,
    label: String,
    decay_fit: Option<DecayFit<T>>,
}

impl<T: Scalar> MomentTable<T> {
    /// Builds a table from raw values (index 0 holds `μ[1]`).
    pub fn from_values(moments: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::construction("moment table", "needs at least one entry"));
        }
        if moments.iter().any(|m| !(m.is_finite() && *m >= T::zero())) {
            return Err(Error::construction("moment table", "entries must be finite and nonnegative"));
        }
        if moments.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::construction("moment table", "entries must be nonincreasing"));
        }
        let decay_fit = fit_decay(&moments);
        Ok(Self { moments, label: label.into(), decay_fit })
    }

    /// `μ[n]`, 1-based.
    #[inline]
    pub fn get(&self, n: usize) -> T {
        self.moments[n - 1]
    }

    pub fn n_max(&self) -> usize {
        self.moments.len()
    }

    /// Slice with `μ[1]` at index 0.
    pub fn as_slice(&self) -> &[T] {
        &self.moments
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `None` when some moment in the fit window is zero.
    pub fn decay_fit(&self) -> Option<DecayFit<T>> {
        self.decay_fit
    }

    /// Writes the table as text: two `#` header lines, then one value per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# label: {}", self.label)?;
        writeln!(out, "# horizon: {}", self.moments.len())?;
        for m in &self.moments {
            writeln!(out, "{:e}", m.as_f64())?;
        }
        Ok(())
    }

    /// Reads a table written by [`MomentTable::write_text`].
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut label = String::new();
        let mut horizon = None;
        let mut values = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::Io(e.to_string()))?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# label:") {
                label = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("# horizon:") {
                horizon = rest.trim().parse::<usize>().ok();
            } else if !line.is_empty() {
                let v: f64 = line.parse().map_err(|_| Error::Config(format!("bad moment value {line:?}")))?;
                values.push(c::<T>(v));
            }
        }
        if horizon != Some(values.len()) {
            return Err(Error::Config(format!("header horizon {horizon:?} does not match {} values", values.len())));
        }
        Self::from_values(values, label)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(e.to_string()))?;
        self.write_text(std::io::BufWriter::new(file)).map_err(|e| Error::Io(e.to_string()))
    }
}

fn fit_decay<T: Scalar>(moments: &[T]) -> Option<DecayFit<T>> {
    let n_max = moments.len();
    if n_max < 4 {
        return None;
    }
    let lo = (n_max / 2).max(1);
    let window = &moments[lo - 1..];
    if window.iter().any(|m| *m <= T::zero()) {
        return None;
    }
    let pts: Vec<(T, T)> =
        window.iter().enumerate().map(|(i, m)| (cn::<T>(lo + i).ln(), m.ln())).collect();
    let count = cn::<T>(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / count;
    let my = pts.iter().map(|p| p.1).sum::<T>() / count;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == T::zero() {
        return None;
    }
    let exponent = sxy / sxx;
    Some(DecayFit { exponent, constant: (my - exponent * mx).exp() })
}

/// Density moments `1..=n_max`, using recurrences where the closed form
/// would lose accuracy.
fn density_moments<T: Scalar>(d: &Density<T>, n_max: usize) -> Vec<T> {
    match d {
        Density::OneMinusTPower { c: coef, s } => {
            // ln B(n, s) = ln B(1, s) − Σ_{j<n} ln(1 + s/j), summed with compensation.
            let mut out = Vec::with_capacity(n_max);
            let base = beta(T::one(), *s).expect("validated").ln();
            let mut acc = NeumaierSum::new();
            acc.add(base);
            out.push(*coef * base.exp());
            for j in 1..n_max {
                acc.add(-(*s / cn::<T>(j)).ln_1p());
                out.push(*coef * acc.value().exp());
            }
            out
        }
        _ => (1..=n_max).map(|n| d.moment(n)).collect(),
    }
}

/// Tabulates `μ[1..=n_max]`.
///
/// Entries are forced nonincreasing by a running minimum, which only ever
/// moves a value by rounding-level amounts.
pub fn moment_table<T: Scalar>(mu: &Measure<T>, n_max: usize) -> Result<MomentTable<T>> {
    if n_max == 0 {
        return Err(Error::domain("moment_table", "n_max must be >= 1"));
    }
    let mut values = match mu.density() {
        Some(d) => density_moments(d, n_max),
        None => vec![T::zero(); n_max],
    };
    for a in mu.atoms() {
        for (i, v) in values.iter_mut().enumerate() {
            *v += a.mass * pow0(a.t, cn::<T>(i));
        }
    }
    for i in 1..values.len() {
        if values[i] > values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    MomentTable::from_values(values, mu.label())
}

/// `μ[n]` through `(n−1) ∫_0^1 t^(n−2) μ([t, 1)) dt`, for `n >= 2`.
pub fn moment_via_tail<T: Scalar>(mu: &Measure<T>, n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::domain("moment_via_tail", format!("requires n >= 2, got {n}")));
    }
    let k = (n - 2) as i32;
    let f = |t: T| t.powi(k) * mu.tail_mass(t);
    let opts = QuadOptions { abs_tol: c(1e-13), rel_tol: c(1e-11), max_intervals: 4000 };
    let r = integrate(f, T::zero(), T::one(), &mu.breakpoints(), opts)?;
    Ok(cn::<T>(n - 1) * r.value)
}

/// Horizon-relative boundedness verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    UnboundedTrend,
}

/// Outcome of [`moment_decay_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck<T> {
    /// `sup_n μ[n]·n^exponent` over the table.
    pub sup_constant: T,
    pub first_half_sup: T,
    pub second_half_sup: T,
    /// `log2(second_half_sup / first_half_sup)`.
    pub growth_exponent: T,
    pub verdict: Verdict,
    pub horizon: usize,
}

/// Compares the suprema of `μ[n]·n^exponent` over the two halves of the
/// table; growth of the second half beyond [`GROWTH_EXPONENT_TOL`] per
/// doubling counts as an unbounded trend.
pub fn moment_decay_check<T: Scalar>(table: &MomentTable<T>, target_exponent: T) -> DecayCheck<T> {
    let n_max = table.n_max();
    let half = (n_max / 2).max(1);
    let scaled = |n: usize| table.get(n) * cn::<T>(n).powf(target_exponent);
    let first = (1..=half).map(scaled).fold(T::zero(), T::max);
    let second = (half + 1..=n_max).map(scaled).fold(T::zero(), T::max);
    let growth = if second == T::zero() {
        -T::infinity()
    } else if first == T::zero() {
        T::infinity()
    } else {
        (second / first).log2()
    };
    let verdict = if n_max >= 2 && growth > c(GROWTH_EXPONENT_TOL) { Verdict::UnboundedTrend } else { Verdict::Bounded };
    DecayCheck {
        sup_constant: first.max(second),
        first_half_sup: first,
        second_half_sup: second,
        growth_exponent: growth,
        verdict,
        horizon: n_max,
    }
}
