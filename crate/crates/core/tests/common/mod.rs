//! Reference implementations used as test oracles. None of them share code
//! with the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// `ln Γ(x)` by upward recurrence to `x >= 30` and the asymptotic series.
pub fn ln_gamma_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut y = x;
    while y < 30.0 {
        shift += y.ln();
        y += 1.0;
    }
    // Bernoulli coefficients B_2k / (2k (2k−1)).
    let coeffs = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0];
    let mut series = 0.0;
    let mut pow = y;
    let y2 = y * y;
    for c in coeffs {
        series += c / pow;
        pow *= y2;
    }
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

pub fn gamma_oracle(x: f64) -> f64 {
    ln_gamma_oracle(x).exp()
}

pub fn beta_oracle(u: f64, v: f64) -> f64 {
    (ln_gamma_oracle(u) + ln_gamma_oracle(v) - ln_gamma_oracle(u + v)).exp()
}

/// Plain left-to-right sum in extended form (pairs) for small series.
pub fn brute_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.collect();
    // Smallest first limits rounding for positive terms.
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.iter().sum()
}

/// Largest singular value of `A_{mn} = m^(α/2) μ[m+n] n^(−α/2)` by a dense
/// symmetric eigensolve of `AᵀA`. `moment(k)` returns `μ[k]`.
pub fn dense_top_singular(moment: impl Fn(usize) -> f64, size: usize, alpha: f64) -> f64 {
    let a = DMatrix::from_fn(size, size, |i, j| {
        let (m, n) = ((i + 1) as f64, (j + 1) as f64);
        m.powf(alpha / 2.0) * moment(i + j + 2) * n.powf(-alpha / 2.0)
    });
    let b = a.transpose() * &a;
    let eig = SymmetricEigen::new(b);
    eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max).sqrt()
}

/// `Σ_{n=1}^{∞} n^(c−1) r^n` by direct summation until terms are negligible.
pub fn polylog_like(c: f64, r: f64) -> f64 {
    let mut s = 0.0;
    let mut n = 1usize;
    loop {
        let t = (n as f64).powf(c - 1.0) * r.powi(n as i32);
        s += t;
        if t < 1e-18 * s && (n as f64) * (1.0 - r) > c + 5.0 {
            return s;
        }
        n += 1;
    }
}
