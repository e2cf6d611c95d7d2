use super::Measure;
use crate::scalar::{c, cn, Scalar};

/// Geometric contribution `coef · t^(k−1)` of a point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricTerm<T> {
    pub coef: T,
    pub t: T,
}

/// Analytic bounds on the moment sequence beyond a horizon:
/// for every `k >= k_min`,
/// `power_lo·k^(−κ) <= μ[k] <= power_hi·k^(−κ) + Σ coef·t^(k−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEnvelope<T> {
    pub k_min: usize,
    pub kappa: T,
    pub power_lo: T,
    pub power_hi: T,
    pub geometric: Vec<GeometricTerm<T>>,
}

/// Relative cushion applied to analytic coefficients against rounding.
const CUSHION: f64 = 1e-12;

impl<T: Scalar> MomentEnvelope<T> {
    pub(super) fn new(mu: &Measure<T>, k_min: usize) -> Self {
        let (kappa, lo, hi) = mu
            .density()
            .map(|d| d.power_envelope(k_min))
            .unwrap_or((T::one(), T::zero(), T::zero()));
        let geometric = mu
            .atoms()
            .iter()
            .map(|a| GeometricTerm { coef: a.mass * (T::one() + c(CUSHION)), t: a.t })
            .collect();
        Self {
            k_min,
            kappa,
            power_lo: lo * (T::one() - c(CUSHION)),
            power_hi: hi * (T::one() + c(CUSHION)),
            geometric,
        }
    }

    pub fn upper(&self, k: usize) -> T {
        debug_assert!(k >= self.k_min);
        let kf = cn::<T>(k);
        let geo: T = self.geometric.iter().map(|g| g.coef * g.t.powf(kf - T::one())).sum();
        self.power_hi * kf.powf(-self.kappa) + geo
    }

    pub fn lower(&self, k: usize) -> T {
        debug_assert!(k >= self.k_min);
        self.power_lo * cn::<T>(k).powf(-self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{moment, Density, Measure};

    #[test]
    fn envelopes_bracket_moments() {
        let cases: Vec<Measure<f64>> = vec![
            Measure::lebesgue(),
            Measure::with_density(Density::Monomial { c: 2.0, k: 3.5 }, "m").unwrap(),
            Measure::with_density(Density::Monomial { c: 1.0, k: -0.5 }, "m").unwrap(),
            Measure::with_density(Density::OneMinusTPower { c: 1.0, s: 0.5 }, "o").unwrap(),
            Measure::with_density(Density::OneMinusTPower { c: 1.0, s: 2.7 }, "o").unwrap(),
            Measure::dirac(0.9).unwrap(),
        ];
        for mu in &cases {
            let env = mu.envelope(50);
            for k in [50usize, 51, 100, 1000, 100_000] {
                let m = moment(mu, k);
                assert!(env.lower(k) <= m * (1.0 + 1e-13), "{}: k={k}", mu.label());
                assert!(m <= env.upper(k) * (1.0 + 1e-13), "{}: k={k}", mu.label());
            }
        }
    }
}
