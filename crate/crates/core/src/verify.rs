//! The acceptance suite: every numbered criterion as a list of measured
//! errors against tolerances, shared by the CLI and the test harness.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Tolerances;
use crate::density::{
    asymptotic_r, asymptotic_ratio, big_g_quadrature, inner_integral_i, j_combination, rho_mass, total_mass_f,
};
use crate::dilog::{li2, rogers_l, ZETA2};
use crate::error::{Error, Result};
use crate::hypgeom::length_from_a;
use crate::montecarlo::{
    cdf_sup_distance, default_bins, mc_class_mass, mc_class_measure, mc_polygon_measure, run_digest,
};
use crate::polygon::{identity_defect, orthospectrum, random_polygon, regular_polygon};
use crate::rng::{rng_stream, Stream};

/// Samples per Monte Carlo criterion.
pub const MC_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Dilog,
    Polygon,
    Density,
    Montecarlo,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::Dilog => &[1, 2],
            Suite::Polygon => &[3, 4, 5],
            Suite::Density => &[6, 7, 8, 9],
            Suite::Montecarlo => &[10, 11],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilog" => Ok(Suite::Dilog),
            "polygon" => Ok(Suite::Polygon),
            "density" => Ok(Suite::Density),
            "montecarlo" => Ok(Suite::Montecarlo),
            "all" => Ok(Suite::All),
            _ => Err(Error::Degenerate(format!("unknown suite {s:?}"))),
        }
    }
}

/// One measured quantity and the largest value that passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            label: label.into(),
            measured,
            tolerance,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
    /// Set when a computation errored instead of producing a measurement.
    pub error: Option<String>,
    /// Hash of the random output, for criteria that sample.
    pub digest: Option<String>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} criterion {:>2} {}", self.id, self.title)?;
        if let Some(e) = &self.error {
            write!(f, ": error: {e}")?;
        }
        for c in &self.checks {
            let mark = if c.passed() { "ok" } else { "FAILED" };
            write!(
                f,
                "\n    {:<44} {:>12.4e} <= {:<10.3e} {mark}",
                c.label, c.measured, c.tolerance
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(CriterionResult::passed)
    }

    /// Combined hash of every sampled criterion, `None` if nothing sampled.
    pub fn digest(&self) -> Option<String> {
        let digests: Vec<&String> = self.results.iter().filter_map(|r| r.digest.as_ref()).collect();
        if digests.is_empty() {
            return None;
        }
        let mut h = Sha256::new();
        for d in digests {
            h.update(d.as_bytes());
        }
        Some(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

pub fn run_suite(suite: Suite, seed: u64, tolerances: &Tolerances) -> VerifyReport {
    VerifyReport {
        suite,
        seed,
        results: suite
            .criteria()
            .iter()
            .map(|&id| run_criterion(id, seed, tolerances))
            .collect(),
    }
}

pub fn criterion_title(id: u32) -> &'static str {
    match id {
        1 => "Rogers L special values",
        2 => "functional equations on random points",
        3 => "polygon identity, regular and random",
        4 => "hexagon relation and quadrilateral reciprocity",
        5 => "Lewin series partial sums",
        6 => "double-integral oracle for -4 L(a)",
        7 => "antiderivative of the inner integral",
        8 => "density mass closure",
        9 => "large-t density asymptotics",
        10 => "Monte Carlo class and polygon masses",
        11 => "Monte Carlo length distribution",
        _ => "unknown criterion",
    }
}

/// Runs one criterion. Errors are recorded in the result, not returned.
pub fn run_criterion(id: u32, seed: u64, tolerances: &Tolerances) -> CriterionResult {
    let mut digest = None;
    let outcome = match id {
        1 => special_values(),
        2 => functional_equations(seed),
        3 => polygon_identity(seed, tolerances),
        4 => hexagon_and_reciprocity(seed),
        5 => lewin_series(),
        6 => integral_oracle(tolerances),
        7 => antiderivative(),
        8 => mass_closure(tolerances),
        9 => asymptotics(tolerances),
        10 => mc_masses(seed, &mut digest),
        11 => mc_shape(seed, &mut digest),
        _ => Err(Error::Degenerate(format!("no criterion {id}"))),
    };
    let (checks, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionResult {
        id,
        title: criterion_title(id).to_string(),
        checks,
        error,
        digest,
    }
}

fn special_values() -> Result<Vec<Check>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let pi2 = PI * PI;
    let cases = [
        ("L(1)", 1.0, pi2 / 6.0),
        ("L(1/2)", 0.5, pi2 / 12.0),
        ("L(1/phi)", 1.0 / phi, pi2 / 10.0),
        ("L(1/phi^2)", 1.0 / (phi * phi), pi2 / 15.0),
        ("L(-1)", -1.0, -pi2 / 12.0),
        ("L(-1/phi)", -1.0 / phi, -pi2 / 15.0),
        ("L(-phi)", -phi, -pi2 / 10.0),
    ];
    cases
        .iter()
        .map(|&(label, x, exact)| Ok(Check::new(label, (rogers_l(x)? - exact).abs(), 1e-12)))
        .collect()
}

/// Largest error of `residual` over `n` draws.
fn max_residual(rng: &mut Stream, n: usize, mut residual: impl FnMut(&mut Stream) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let r = residual(rng)?;
        if r.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

fn functional_equations(seed: u64) -> Result<Vec<Check>> {
    const N: usize = 10_000;
    const TOL: f64 = 1e-10;
    let l = |x: f64| rogers_l(x);
    let reflection = max_residual(&mut rng_stream(seed, 101), N, |r| {
        let x = r.uniform();
        Ok(l(x)? + l(1.0 - x)? - ZETA2)
    })?;
    let inversion = max_residual(&mut rng_stream(seed, 102), N, |r| {
        let x = (40.0 * r.uniform() - 20.0).exp();
        Ok(l(-x)? + l(-1.0 / x)? + ZETA2)
    })?;
    let landen = max_residual(&mut rng_stream(seed, 103), N, |r| {
        let x = r.uniform();
        Ok(l(-x / (1.0 - x))? + l(x)?)
    })?;
    let abel = max_residual(&mut rng_stream(seed, 104), N, |r| {
        let (x, y) = (r.uniform(), r.uniform());
        let d = 1.0 - x * y;
        Ok(l(x)? + l(y)? - l(x * y)? - l(x * (1.0 - y) / d)? - l(y * (1.0 - x) / d)?)
    })?;
    let duplication = max_residual(&mut rng_stream(seed, 105), N, |r| {
        let x = 2.0 * r.uniform() - 1.0;
        Ok(li2(x)? + li2(-x)? - 0.5 * li2(x * x)?)
    })?;
    Ok(vec![
        Check::new("reflection L(x)+L(1-x)", reflection, TOL),
        Check::new("inversion L(-x)+L(-1/x)", inversion, TOL),
        Check::new("Landen L(x/(x-1))+L(x)", landen, TOL),
        Check::new("Abel five-term", abel, TOL),
        Check::new("duplication Li2(x)+Li2(-x)", duplication, TOL),
    ])
}

fn polygon_identity(seed: u64, tolerances: &Tolerances) -> Result<Vec<Check>> {
    let mut regular: f64 = 0.0;
    for n in 3..=12 {
        regular = regular.max(identity_defect(&regular_polygon(n)?).abs());
    }
    let mut rng = rng_stream(seed, 201);
    let mut random: f64 = 0.0;
    for _ in 0..1000 {
        let n = 4 + (rng.uniform() * 7.0) as usize;
        let p = random_polygon(n, 1e-3, &mut rng)?;
        random = random.max(identity_defect(&p).abs());
    }
    Ok(vec![
        Check::new("regular n = 3..12", regular, tolerances.identity_tol),
        Check::new("1000 random, n = 4..10", random, tolerances.identity_tol),
    ])
}

fn hexagon_and_reciprocity(seed: u64) -> Result<Vec<Check>> {
    let hexagon = (6.0 * rogers_l(1.0 / 3.0)? + 3.0 * rogers_l(0.25)? - PI * PI / 2.0).abs();
    let mut rng = rng_stream(seed, 301);
    let mut product: f64 = 0.0;
    let mut sum: f64 = 0.0;
    for _ in 0..1000 {
        let s = orthospectrum(&random_polygon(4, 1e-3, &mut rng)?);
        let (e1, e2) = (&s.entries[0], &s.entries[1]);
        product = product.max((e1.a * e2.a - 1.0).abs());
        sum = sum.max((e1.b + e2.b - 1.0).abs());
    }
    Ok(vec![
        Check::new("6L(1/3) + 3L(1/4) - pi^2/2", hexagon, 1e-12),
        Check::new("quadrilateral a1 a2 - 1", product, 1e-10),
        Check::new("quadrilateral b1 + b2 - 1", sum, 1e-10),
    ])
}

fn lewin_series() -> Result<Vec<Check>> {
    const R: u64 = 10_000;
    let mut partial = 0.0;
    let mut steps_not_increasing = 0u32;
    for r in 2..=R {
        let next = partial + rogers_l(1.0 / (r as f64 * r as f64))?;
        if next <= partial {
            steps_not_increasing += 1;
        }
        partial = next;
    }
    let total = crate::polygon::lewin_partial_sum(R)?;
    Ok(vec![
        Check::new("pi^2/6 - partial sum at R = 1e4", (ZETA2 - total).abs(), 2e-3),
        Check::new("non-increasing steps", f64::from(steps_not_increasing), 0.0),
    ])
}

fn integral_oracle(tolerances: &Tolerances) -> Result<Vec<Check>> {
    [-0.1, -1.0, -10.0]
        .iter()
        .map(|&a| {
            let err = (big_g_quadrature(a)? + 4.0 * rogers_l(a)?).abs();
            Ok(Check::new(format!("a = {a}"), err, tolerances.oracle_tol))
        })
        .collect()
}

fn antiderivative() -> Result<Vec<Check>> {
    let h = 1e-5;
    let mut checks = Vec::new();
    for &a in &[-0.1, -1.0, -10.0] {
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            // y from 1.1 to 1001, evenly in log(y - 1).
            let y = 1.0 + 10f64.powf(-1.0 + 3.0 * k as f64 / 19.0);
            let fd = (j_combination(y + h, a)? - j_combination(y - h, a)?) / (2.0 * h);
            worst = worst.max((fd - inner_integral_i(y, a)?).abs());
        }
        checks.push(Check::new(format!("a = {a}, 20 values of y"), worst, 1e-6));
    }
    Ok(checks)
}

fn mass_closure(tolerances: &Tolerances) -> Result<Vec<Check>> {
    [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&l| {
            let err = (rho_mass(l, tolerances)?.total - total_mass_f(l)?).abs();
            Ok(Check::new(format!("l = {l}"), err, tolerances.mass_tol))
        })
        .collect()
}

fn asymptotics(tolerances: &Tolerances) -> Result<Vec<Check>> {
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| {
            let t = f64::max(20.0, 10.0 * l);
            let rel = (asymptotic_ratio(l, t)? / asymptotic_r(l)? - 1.0).abs();
            Ok(Check::new(
                format!("l = {l}, t = {t}, relative to r(l)"),
                rel,
                tolerances.asymptote_tol,
            ))
        })
        .collect()
}

fn mc_masses(seed: u64, digest: &mut Option<String>) -> Result<Vec<Check>> {
    let class = mc_class_mass(-1.0, MC_SAMPLES, seed)?;
    let exact = 2.0 * PI * PI / 3.0;
    let mut h = Sha256::new();
    h.update(class.estimate.to_bits().to_le_bytes());
    h.update(class.stderr.to_bits().to_le_bytes());
    let mut checks = vec![Check::new(
        "class a = -1: |error| / stderr",
        (class.estimate - exact).abs() / class.stderr,
        3.0,
    )];
    for n in [4, 5] {
        let run = mc_polygon_measure(&regular_polygon(n)?, MC_SAMPLES, seed, &default_bins())?;
        h.update(run_digest(&run).as_bytes());
        checks.push(Check::new(
            format!("regular {n}-gon total, relative to 4 pi^2 |chi|"),
            (run.total / run.expected_total - 1.0).abs(),
            0.01,
        ));
    }
    *digest = Some(h.finalize().iter().map(|b| format!("{b:02x}")).collect());
    Ok(checks)
}

fn mc_shape(seed: u64, digest: &mut Option<String>) -> Result<Vec<Check>> {
    let mut h = Sha256::new();
    let mut checks = Vec::new();
    for &a in &[-0.1, -1.0, -10.0] {
        let (_, measure) = mc_class_measure(a, MC_SAMPLES, seed, &default_bins())?;
        h.update(measure.digest().as_bytes());
        let l = length_from_a(a)?;
        checks.push(Check::new(
            format!("CDF sup distance, l = {l:.4}"),
            cdf_sup_distance(a, &measure)?,
            0.01,
        ));
    }
    *digest = Some(h.finalize().iter().map(|b| format!("{b:02x}")).collect());
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_partition_all() {
        let mut ids: Vec<u32> = [Suite::Dilog, Suite::Polygon, Suite::Density, Suite::Montecarlo]
            .iter()
            .flat_map(|s| s.criteria().iter().copied())
            .collect();
        ids.sort();
        assert_eq!(ids, Suite::All.criteria());
    }

    #[test]
    fn nan_fails() {
        assert!(!Check::new("x", f64::NAN, 1.0).passed());
        assert!(Check::new("x", 0.0, 0.0).passed());
    }

    #[test]
    fn dilog_suite_passes() {
        let report = run_suite(Suite::Dilog, 0, &Tolerances::default());
        assert!(report.passed(), "{:?}", report);
        assert_eq!(report.digest(), None);
    }

    #[test]
    fn unknown_criterion_is_an_error() {
        let r = run_criterion(12, 0, &Tolerances::default());
        assert!(!r.passed());
        assert!(r.error.is_some());
    }
}
