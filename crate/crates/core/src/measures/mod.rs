//! Finite positive measures on `[0, 1)`: moments, tail masses and
//! Carleson-type checks.

mod carleson;
mod density;
mod envelope;
mod moments;

pub use carleson::{carleson_grid, carleson_sup, CarlesonQuery};
pub use density::{Density, PolyPiece};
pub use envelope::{GeometricTerm, MomentEnvelope};
pub use moments::{
    moment, moment_decay_check, moment_table, moment_via_tail, DecayCheck, DecayFit, MomentTable, Verdict,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Growth exponent above which a finite-horizon trend counts as divergent.
///
/// Shared by the Carleson and moment-decay verdicts so that both tests use
/// the same notion of "no growth".
pub const GROWTH_EXPONENT_TOL: f64 = 0.01;

/// A point mass `mass · δ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T> {
    pub t: T,
    pub mass: T,
}

/// Finite positive Borel measure on `[0, 1)`: atoms plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<T> {
    atoms: Vec<Atom<T>>,
    density: Option<Density<T>>,
    label: String,
}

impl<T: Scalar> Measure<T> {
    /// Validates and builds a measure.
    pub fn new(atoms: Vec<Atom<T>>, density: Option<Density<T>>, label: impl Into<String>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.t >= T::zero() && a.t < T::one()) {
                return Err(Error::construction("atom", format!("atom {i} location {} is outside [0, 1)", a.t)));
            }
            if !(a.mass > T::zero() && a.mass.is_finite()) {
                return Err(Error::construction(
                    "atom",
                    format!("atom {i} mass must be positive and finite, got {}", a.mass),
                ));
            }
        }
        if let Some(d) = &density {
            d.validate()?;
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("validated finite"));
        Ok(Self { atoms, density, label: label.into() })
    }

    /// Lebesgue measure `dt`.
    pub fn lebesgue() -> Self {
        Self::with_density(Density::Constant { c: T::one() }, "lebesgue").expect("valid")
    }

    /// Unit point mass at `t`.
    pub fn dirac(t: T) -> Result<Self> {
        Self::new(vec![Atom { t, mass: T::one() }], None, format!("dirac:{t}"))
    }

    /// Measure `g(t) dt`.
    pub fn with_density(density: Density<T>, label: impl Into<String>) -> Result<Self> {
        Self::new(Vec::new(), Some(density), label)
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density<T>> {
        self.density.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `λ μ` for `λ > 0`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::construction("measure", format!("scale must be positive, got {lambda}")));
        }
        Ok(Self {
            atoms: self.atoms.iter().map(|a| Atom { t: a.t, mass: a.mass * lambda }).collect(),
            density: self.density.as_ref().map(|d| d.scaled(lambda)),
            label: format!("{}*{}", lambda, self.label),
        })
    }

    /// `μ([0, 1))`.
    pub fn total_mass(&self) -> T {
        moment(self, 1)
    }

    /// `μ([t, 1))`; atoms at exactly `t` are included.
    pub fn tail_mass(&self, t: T) -> T {
        let atoms: T = self.atoms.iter().filter(|a| a.t >= t).map(|a| a.mass).sum();
        atoms + self.density.as_ref().map_or(T::zero(), |d| d.tail_mass(t))
    }

    /// Locations where the tail mass or density is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut b: Vec<T> = self.atoms.iter().map(|a| a.t).collect();
        if let Some(d) = &self.density {
            b.extend(d.breakpoints());
        }
        b
    }

    /// Certified bounds on `μ[k]` for `k >= k_min`.
    pub fn envelope(&self, k_min: usize) -> MomentEnvelope<T> {
        MomentEnvelope::new(self, k_min.max(2))
    }
}

/// Free-function form of [`Measure::tail_mass`].
pub fn tail_mass<T: Scalar>(mu: &Measure<T>, t: T) -> T {
    mu.tail_mass(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_invalid_parts() {
        assert!(Measure::new(vec![Atom { t: 1.0f64, mass: 1.0 }], None, "x").is_err());
        assert!(Measure::new(vec![Atom { t: 0.5f64, mass: -1.0 }], None, "x").is_err());
        assert!(Measure::with_density(Density::Monomial { c: 1.0f64, k: -1.0 }, "x").is_err());
        assert!(Measure::with_density(Density::OneMinusTPower { c: 1.0f64, s: 0.0 }, "x").is_err());
        let negative = Density::PiecewisePoly {
            pieces: vec![PolyPiece { start: 0.0f64, end: 1.0, coeffs: vec![0.2, -1.0, 1.0] }],
        };
        // 0.2 − t + t² has minimum −0.05 at t = 1/2.
        assert!(Measure::with_density(negative, "x").is_err());
    }

    #[test]
    fn tail_mass_examples() {
        let leb = Measure::<f64>::lebesgue();
        assert!((leb.tail_mass(0.25) - 0.75).abs() < 1e-16);
        let d = Measure::dirac(0.5f64).unwrap();
        assert_eq!(d.tail_mass(0.5), 1.0);
        assert_eq!(d.tail_mass(0.6), 0.0);
        let g = Measure::with_density(Density::OneMinusTPower { c: 1.0f64, s: 2.0 }, "1-t").unwrap();
        for &t in &[0.0, 0.3, 0.9] {
            assert!((g.tail_mass(t) - (1.0 - t) * (1.0 - t) / 2.0).abs() < 1e-16);
        }
    }

    #[test]
    fn piecewise_tail_mass_and_moments() {
        // g = 2t on [0, 1): tail mass 1 − t², μ[n] = 2/(n+1).
        let g = Density::PiecewisePoly {
            pieces: vec![
                PolyPiece { start: 0.0f64, end: 0.5, coeffs: vec![0.0, 2.0] },
                PolyPiece { start: 0.5, end: 1.0, coeffs: vec![0.0, 2.0] },
            ],
        };
        let mu = Measure::with_density(g, "2t").unwrap();
        assert!((mu.tail_mass(0.3) - 0.91).abs() < 1e-15);
        assert!((moment(&mu, 4) - 0.4).abs() < 1e-15);
        assert!(mu.density().unwrap().is_nondecreasing());
        assert_eq!(mu.density().unwrap().sup_norm(), Some(2.0));
    }
}
