use super::{Measure, GROWTH_EXPONENT_TOL};
use crate::error::{Error, Result};
use crate::scalar::{c, cn, Scalar};

/// Smallest distance to 1 reached by the probe grid.
const GRID_FLOOR: f64 = 1e-9;

/// Result of probing `μ([t,1)) / (1−t)^s` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlesonQuery<T> {
    pub s: T,
    pub grid: Vec<T>,
    pub ratios: Vec<T>,
    pub sup_ratio: T,
    pub argmax_t: T,
    /// Growth exponent of the ratio against `1/(1−t)` over the last decade.
    pub growth_exponent: T,
    pub is_finite: bool,
}

/// Probe points `t_k = 1 − 2^(−k·scale)`, `k = 0..grid_size`, with the last
/// point at `1 − t = 1e-9`. Grids of size `2g − 1` contain grids of size `g`
/// bit for bit.
pub fn carleson_grid<T: Scalar>(grid_size: usize) -> Vec<T> {
    assert!(grid_size >= 2);
    let scale = -c::<T>(GRID_FLOOR).log2() / cn::<T>(grid_size - 1);
    (0..grid_size).map(|k| T::one() - (-(cn::<T>(k) * scale)).exp2()).collect()
}

/// Evaluates the `s`-Carleson ratio on [`carleson_grid`] plus the atom
/// locations of `mu`.
pub fn carleson_sup<T: Scalar>(mu: &Measure<T>, s: T, grid_size: usize) -> Result<CarlesonQuery<T>> {
    if !(s > T::zero() && s.is_finite()) {
        return Err(Error::domain("carleson_sup", format!("s must be positive, got {s}")));
    }
    if grid_size < 2 {
        return Err(Error::domain("carleson_sup", "grid_size must be >= 2"));
    }
    let geometric = carleson_grid::<T>(grid_size);
    let mut grid = geometric.clone();
    grid.extend(mu.atoms().iter().map(|a| a.t));
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    grid.dedup();
    let ratio = |t: T| mu.tail_mass(t) / (T::one() - t).powf(s);
    let ratios: Vec<T> = grid.iter().map(|&t| ratio(t)).collect();
    let (mut sup_ratio, mut argmax_t) = (T::zero(), grid[0]);
    for (&t, &r) in grid.iter().zip(&ratios) {
        if r > sup_ratio {
            sup_ratio = r;
            argmax_t = t;
        }
    }

    // Trend over the last decade of 1 − t.
    let last = *geometric.last().expect("nonempty");
    let gap_last = T::one() - last;
    let reference = geometric
        .iter()
        .rev()
        .copied()
        .find(|&t| T::one() - t >= c::<T>(10.0) * gap_last)
        .unwrap_or(geometric[0]);
    let (r_last, r_ref) = (ratio(last), ratio(reference));
    let growth_exponent = if r_last == T::zero() {
        -T::infinity()
    } else if r_ref == T::zero() {
        T::infinity()
    } else {
        (r_last / r_ref).ln() / ((T::one() - reference) / gap_last).ln()
    };
    let is_finite = growth_exponent <= c(GROWTH_EXPONENT_TOL);
    Ok(CarlesonQuery { s, grid, ratios, sup_ratio, argmax_t, growth_exponent, is_finite })
}
