//! Identity batteries for the special functions and the moment machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::measures::{moment, moment_via_tail, Density, Measure};
use crate::report::ExperimentReport;
use crate::specfun::{beta, gamma, pi_csc, stirling_remainder_bound};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest error relative to the suite's tolerance scale.
    pub max_error: f64,
    pub tolerance: String,
    pub pass: bool,
}

fn finish(name: &'static str, cases: usize, failures: usize, max_error: f64, tolerance: String) -> SuiteResult {
    SuiteResult { name, cases, failures, max_error, tolerance, pass: failures == 0 && cases > 0 }
}

/// `|B(s, 1−s) − π csc(πs)| / π csc(πs) <= 1e-10` for `s = k/100`.
pub fn beta_csc_suite() -> SuiteResult {
    let (mut failures, mut worst) = (0, 0.0f64);
    for k in 1..100 {
        let s = k as f64 / 100.0;
        let err = match (beta(s, 1.0 - s), pi_csc(s)) {
            (Ok(b), Ok(c)) => (b - c).abs() / c,
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
        if !(err <= 1e-10) {
            failures += 1;
        }
    }
    finish("beta_csc", 99, failures, worst, "relative 1e-10".into())
}

/// `|r(x)| <= e^(1/(12x)) − 1` for the Stirling remainder.
pub fn stirling_suite() -> SuiteResult {
    let xs = [1.0f64, 2.0, 5.0, 10.0, 20.0, 50.0];
    let (mut failures, mut worst) = (0, 0.0f64);
    for &x in &xs {
        match stirling_remainder_bound(x) {
            Ok((r, bound)) => {
                worst = worst.max(r.abs() / bound);
                if !(r.abs() <= bound) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    finish("stirling_envelope", xs.len(), failures, worst, "|r(x)| / bound <= 1".into())
}

/// `Γ(x+1) = x Γ(x)` at seeded random points in `(0.05, 40)`.
pub fn gamma_recurrence_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..cases {
        let x: f64 = rng.gen_range(0.05..40.0);
        let err = match (gamma(x + 1.0), gamma(x)) {
            (Ok(a), Ok(b)) => (a - x * b).abs() / a,
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
        if !(err <= 1e-13) {
            failures += 1;
        }
    }
    finish("gamma_recurrence", cases, failures, worst, "relative 1e-13".into())
}

/// Measures used by the moment identity battery.
pub fn moment_battery() -> Vec<Measure<f64>> {
    vec![
        Measure::lebesgue(),
        Measure::dirac(0.5).expect("valid"),
        Measure::with_density(Density::OneMinusTPower { c: 1.0, s: 2.0 }, "one-minus-t:2").expect("valid"),
        Measure::with_density(Density::OneMinusTPower { c: 1.0, s: 0.5 }, "one-minus-t:0.5").expect("valid"),
        Measure::with_density(Density::Monomial { c: 2.0, k: 1.0 }, "monomial:1:2").expect("valid"),
    ]
}

/// `moment_via_tail` against `moment` for `n = 2..=50`, tolerance
/// `1e-9 + 1e-8 |μ[n]|`.
pub fn moment_tail_suite() -> SuiteResult {
    let (mut failures, mut cases, mut worst) = (0, 0, 0.0f64);
    for mu in moment_battery() {
        for n in 2..=50 {
            cases += 1;
            let exact = moment(&mu, n);
            let tol = 1e-9 + 1e-8 * exact.abs();
            let err = moment_via_tail(&mu, n).map_or(f64::INFINITY, |v| (v - exact).abs());
            worst = worst.max(err / tol);
            if !(err <= tol) {
                failures += 1;
            }
        }
    }
    finish("moment_via_tail", cases, failures, worst, "1e-9 + 1e-8 |mu[n]|, reported as error/tol".into())
}

pub fn identity_suites(seed: u64) -> Vec<SuiteResult> {
    vec![beta_csc_suite(), stirling_suite(), gamma_recurrence_suite(seed, 200), moment_tail_suite()]
}

pub(crate) fn identity_report(seed: u64) -> ExperimentReport {
    let start = std::time::Instant::now();
    let suites = identity_suites(seed);
    let mut report = ExperimentReport::new("identities", json!({ "seed": seed }));
    report.details = json!({
        "suites": suites,
        "all_pass": suites.iter().all(|s| s.pass),
    });
    report.runtime_seconds = start.elapsed().as_secs_f64();
    report
}
