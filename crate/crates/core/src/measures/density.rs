use crate::error::{Error, Result};
use crate::scalar::{c, cn, Scalar};
use crate::specfun::{gamma, ln_beta};

/// One polynomial piece `Σ_j coeffs[j] t^j` supported on `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece<T> {
    pub start: T,
    pub end: T,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> PolyPiece<T> {
    pub fn eval(&self, t: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &cf| acc * t + cf)
    }

    fn deriv_eval(&self, t: T) -> T {
        let mut acc = T::zero();
        for (j, &cf) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * t + cf * cn::<T>(j);
        }
        acc
    }

    /// `∫_a^b t^(n−1) p(t) dt` over the sub-interval `[a, b]` of the piece.
    fn weighted_integral(&self, a: T, b: T, n: T) -> T {
        let mut total = T::zero();
        for (j, &cf) in self.coeffs.iter().enumerate() {
            if cf == T::zero() {
                continue;
            }
            let e = n + cn::<T>(j);
            let ib = b.powf(e);
            let ia = if a == T::zero() { T::zero() } else { a.powf(e) };
            total += cf * (ib - ia) / e;
        }
        total
    }

    /// Extreme values on the closed piece: endpoints plus critical points
    /// located by derivative sign changes on a sampling grid and bisection.
    pub fn extrema(&self) -> (T, T) {
        const SAMPLES: usize = 512;
        let mut lo = self.eval(self.start).min(self.eval(self.end));
        let mut hi = self.eval(self.start).max(self.eval(self.end));
        if self.coeffs.len() <= 2 {
            return (lo, hi);
        }
        let width = self.end - self.start;
        let mut prev_t = self.start;
        let mut prev_d = self.deriv_eval(prev_t);
        for i in 1..=SAMPLES {
            let t = self.start + width * cn::<T>(i) / cn::<T>(SAMPLES);
            let d = self.deriv_eval(t);
            let v = self.eval(t);
            lo = lo.min(v);
            hi = hi.max(v);
            if (prev_d < T::zero()) != (d < T::zero()) {
                let (mut a, mut b) = (prev_t, t);
                let da_neg = prev_d < T::zero();
                for _ in 0..200 {
                    let m = c::<T>(0.5) * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if (self.deriv_eval(m) < T::zero()) == da_neg {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let v = self.eval(c::<T>(0.5) * (a + b));
                lo = lo.min(v);
                hi = hi.max(v);
            }
            prev_t = t;
            prev_d = d;
        }
        (lo, hi)
    }

    /// Whether the polynomial is nondecreasing on the piece.
    fn is_nondecreasing(&self) -> bool {
        const SAMPLES: usize = 512;
        let width = self.end - self.start;
        let scale = self.coeffs.iter().fold(T::zero(), |m, &cf| m + cf.abs());
        let tol = c::<T>(1e-12) * scale.max(T::one());
        (0..=SAMPLES).all(|i| {
            let t = self.start + width * cn::<T>(i) / cn::<T>(SAMPLES);
            self.deriv_eval(t) >= -tol
        })
    }
}

/// Absolutely continuous part of a measure on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T> {
    /// `g(t) = c`.
    Constant { c: T },
    /// `g(t) = c t^k`, `k > −1`.
    Monomial { c: T, k: T },
    /// `g(t) = c (1 − t)^(s − 1)`, `s > 0`.
    OneMinusTPower { c: T, s: T },
    /// Polynomial pieces on disjoint sub-intervals; zero elsewhere.
    PiecewisePoly { pieces: Vec<PolyPiece<T>> },
}

impl<T: Scalar> Density<T> {
    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::construction("density", detail));
        let finite_nonneg = |x: T| x.is_finite() && x >= T::zero();
        match self {
            Density::Constant { c } => {
                if !finite_nonneg(*c) {
                    return bad(format!("constant density must be finite and >= 0, got {c}"));
                }
            }
            Density::Monomial { c, k } => {
                if !finite_nonneg(*c) {
                    return bad(format!("monomial coefficient must be finite and >= 0, got {c}"));
                }
                if !(k.is_finite() && *k > -T::one()) {
                    return bad(format!("monomial exponent must exceed -1 for integrability, got {k}"));
                }
            }
            Density::OneMinusTPower { c, s } => {
                if !finite_nonneg(*c) {
                    return bad(format!("coefficient must be finite and >= 0, got {c}"));
                }
                if !(s.is_finite() && *s > T::zero()) {
                    return bad(format!("(1-t)^(s-1) requires s > 0 for integrability, got {s}"));
                }
            }
            Density::PiecewisePoly { pieces } => {
                let mut last_end = T::zero();
                for (i, p) in pieces.iter().enumerate() {
                    if !(p.start >= last_end && p.start < p.end && p.end <= T::one()) {
                        return bad(format!(
                            "piece {i} [{}, {}) must be nonempty, inside [0, 1] and after the previous piece",
                            p.start, p.end
                        ));
                    }
                    if p.coeffs.is_empty() || p.coeffs.iter().any(|x| !x.is_finite()) {
                        return bad(format!("piece {i} needs finite coefficients"));
                    }
                    let (lo, _) = p.extrema();
                    let scale = p.coeffs.iter().fold(T::zero(), |m, &cf| m + cf.abs());
                    if lo < -c::<T>(1e-12) * scale.max(T::one()) {
                        return bad(format!("piece {i} takes the negative value {lo}"));
                    }
                    last_end = p.end;
                }
            }
        }
        Ok(())
    }

    /// Density value at `t ∈ [0, 1)`.
    pub fn eval(&self, t: T) -> T {
        match self {
            Density::Constant { c } => *c,
            Density::Monomial { c, k } => *c * crate::scalar::pow0(t, *k),
            Density::OneMinusTPower { c, s } => *c * (T::one() - t).powf(*s - T::one()),
            Density::PiecewisePoly { pieces } => pieces
                .iter()
                .find(|p| t >= p.start && t < p.end)
                .map_or(T::zero(), |p| p.eval(t)),
        }
    }

    /// `∫_0^1 t^(n−1) g(t) dt`, in closed form.
    pub fn moment(&self, n: usize) -> T {
        let nf = cn::<T>(n);
        match self {
            Density::Constant { c } => *c / nf,
            Density::Monomial { c, k } => *c / (nf + *k),
            Density::OneMinusTPower { c, s } => {
                *c * ln_beta(nf, *s).expect("validated positive arguments").exp()
            }
            Density::PiecewisePoly { pieces } => {
                pieces.iter().map(|p| p.weighted_integral(p.start, p.end, nf)).sum()
            }
        }
    }

    /// `∫_t^1 g`.
    pub fn tail_mass(&self, t: T) -> T {
        let one = T::one();
        match self {
            Density::Constant { c } => *c * (one - t),
            Density::Monomial { c, k } => {
                let e = *k + one;
                if t == T::zero() {
                    *c / e
                } else {
                    -*c * (e * t.ln()).exp_m1() / e
                }
            }
            Density::OneMinusTPower { c, s } => *c * (one - t).powf(*s) / *s,
            Density::PiecewisePoly { pieces } => pieces
                .iter()
                .filter(|p| p.end > t)
                .map(|p| p.weighted_integral(p.start.max(t), p.end, one))
                .sum(),
        }
    }

    /// Points where the density or its tail mass is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Density::PiecewisePoly { pieces } => pieces.iter().flat_map(|p| [p.start, p.end]).collect(),
            _ => Vec::new(),
        }
    }

    /// `sup_{[0,1)} g`, or `None` when the density is unbounded.
    pub fn sup_norm(&self) -> Option<T> {
        match self {
            Density::Constant { c } => Some(*c),
            Density::Monomial { c, k } => {
                if *c == T::zero() || *k >= T::zero() {
                    Some(*c)
                } else {
                    None
                }
            }
            Density::OneMinusTPower { c, s } => {
                if *c == T::zero() || *s >= T::one() {
                    Some(*c)
                } else {
                    None
                }
            }
            Density::PiecewisePoly { pieces } => {
                Some(pieces.iter().map(|p| p.extrema().1).fold(T::zero(), T::max))
            }
        }
    }

    /// Whether `g` is nondecreasing on `[0, 1)`.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Density::Constant { .. } => true,
            Density::Monomial { c, k } => *c == T::zero() || *k >= T::zero(),
            Density::OneMinusTPower { c, s } => *c == T::zero() || *s <= T::one(),
            Density::PiecewisePoly { pieces } => {
                // Within pieces and across the junctions (gaps count as zero).
                let mut prev_end_value = T::zero();
                let mut prev_end = T::zero();
                for p in pieces {
                    let start_value = p.eval(p.start);
                    let gap = p.start > prev_end;
                    if gap && prev_end_value > T::zero() {
                        return false;
                    }
                    if start_value < prev_end_value - c::<T>(1e-12) || !p.is_nondecreasing() {
                        return false;
                    }
                    prev_end_value = p.eval(p.end);
                    prev_end = p.end;
                }
                prev_end >= T::one() || prev_end_value == T::zero()
            }
        }
    }

    /// Multiplies the density by `lambda >= 0`.
    pub fn scaled(&self, lambda: T) -> Self {
        match self {
            Density::Constant { c } => Density::Constant { c: *c * lambda },
            Density::Monomial { c, k } => Density::Monomial { c: *c * lambda, k: *k },
            Density::OneMinusTPower { c, s } => Density::OneMinusTPower { c: *c * lambda, s: *s },
            Density::PiecewisePoly { pieces } => Density::PiecewisePoly {
                pieces: pieces
                    .iter()
                    .map(|p| PolyPiece {
                        start: p.start,
                        end: p.end,
                        coeffs: p.coeffs.iter().map(|&x| x * lambda).collect(),
                    })
                    .collect(),
            },
        }
    }

    /// Power-law bounds `lo·k^(−κ) <= ∫ t^(k−1) g <= hi·k^(−κ)` valid for
    /// all `k >= k_min`. Returns `(κ, lo, hi)`.
    pub(crate) fn power_envelope(&self, k_min: usize) -> (T, T, T) {
        let km = cn::<T>(k_min);
        let one = T::one();
        match self {
            Density::Constant { c } => (one, *c, *c),
            Density::Monomial { c, k } => {
                let lo = *c / (one + k.max(T::zero()) / km);
                let hi = *c / (one + k.min(T::zero()) / km);
                (one, lo, hi)
            }
            Density::OneMinusTPower { c, s } => {
                // Γ(n)/Γ(n+s) lies between n^(−s)(1+s/n)^(−⌈s⌉) and n^(−s)(1+s/n).
                let g = gamma(*s).expect("validated positive exponent");
                let r = one + *s / km;
                let lo = *c * g * r.powf(-s.ceil());
                let hi = *c * g * r;
                (*s, lo, hi)
            }
            Density::PiecewisePoly { pieces } => {
                let hi = pieces.iter().map(|p| p.extrema().1).fold(T::zero(), T::max);
                let lo = pieces
                    .last()
                    .filter(|p| p.end >= one)
                    .map(|p| {
                        let gmin = p.extrema().0.max(T::zero());
                        gmin * (one - p.start.powf(km))
                    })
                    .unwrap_or(T::zero());
                (one, lo, hi)
            }
        }
    }
}
