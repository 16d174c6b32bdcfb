//! Distribution of the length a random geodesic spends inside a polygon.
//!
//! The push-forward of the Liouville measure under the intersection length
//! splits into a term for each cusp, `4 t²/sinh²t`, and a density
//! `rho(l, t)` for each orthogeodesic of length `l`, supported on `t >= l`
//! with total mass `8 L(1/cosh²(l/2))`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::dilog::{rogers_l, rogers_l_infinity, ZETA2};
use crate::error::{Error, Result};
use crate::hypgeom::{a_from_length, critical_points, CriticalPair};
use crate::output::fmt17;
use crate::polygon::{orthospectrum, IdealPolygon};
use crate::quad::{gauss_kronrod, tanh_sinh, Tolerance};

/// Largest `t` accepted by [`rho`]; beyond it `e^{-2t}` leaves the normal
/// floating-point range.
pub const MAX_T: f64 = 300.0;

/// `4 N t²/sinh²t`, the density contributed by `N` cusps.
pub fn cusp_density(count: usize, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::domain("cusp_density", t, "t > 0"));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    // t/sinh t = 2t e^{-t}/(1 - e^{-2t}), finite for every t > 0.
    let ratio = 2.0 * t * (-t).exp() / -(-2.0 * t).exp_m1();
    Ok(4.0 * count as f64 * ratio * ratio)
}

/// `2Nπ²/3`, the total mass of [`cusp_density`].
pub fn cusp_mass(count: usize) -> f64 {
    4.0 * count as f64 * ZETA2
}

fn check_length(op: &'static str, l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, l, "0 < l < ∞"))
    }
}

/// Data for one evaluation of `rho(l, t)` at `t > l`.
///
/// The `x`-integral runs between the two roots of `f(x) = f(y0) e^{-2t}`
/// in `(a, 0)`, where the inverse branches of `f` have square-root branch
/// points. Everything is kept in units of `e^{2t}` so that no quantity
/// overflows at large `t`.
struct RhoIntegrand {
    a: f64,
    crit: CriticalPair,
    /// `e^{-2t}`.
    decay: f64,
    x_lo: f64,
    x_hi: f64,
    x_lo_minus_a: f64,
}

impl RhoIntegrand {
    fn new(l: f64, t: f64) -> Result<Self> {
        let a = a_from_length(l)?;
        let crit = critical_points(a)?;
        let decay = (-2.0 * t).exp();
        let level = crit.f_y0 * decay;
        // level - f(x0) = f(x0)(e^{-2(t-l)} - 1), since f(x0) = f(y0) e^{-2l}.
        let below_max = crit.f_x0 * -(-2.0 * (t - l)).exp_m1();
        let span = (below_max.max(0.0) * (crit.f_y0 - level)).sqrt();
        let x_lo = 0.5 * (a + level - span);
        let x_hi = level / x_lo;
        Ok(RhoIntegrand {
            a,
            crit,
            decay,
            x_lo,
            x_hi,
            // From x(x - a) = level (x - 1) at the root.
            x_lo_minus_a: level * (x_lo - 1.0) / x_lo,
        })
    }

    fn span(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// `e^{4t} f(x) [g₊'(w)/(x - g₊(w))² - g₋'(w)/(x - g₋(w))²]` with
    /// `w = f(x) e^{2t}`, given `x` and its distances to both ends.
    fn eval(&self, x: f64, from_lo: f64, to_hi: f64) -> f64 {
        let a = self.a;
        let x_minus_a = if from_lo <= to_hi {
            self.x_lo_minus_a + from_lo
        } else {
            x - a
        };
        let fx = x * x_minus_a / (x - 1.0);
        // w - f(y0) = e^{2t} (x - x_lo)(x_hi - x)/(1 - x), so √D carries the
        // branch-point factor exactly.
        let sqrt_d = (fx - self.crit.f_x0 * self.decay).sqrt() * (from_lo * to_hi / (1.0 - x)).sqrt();
        let c = fx + (a - 2.0) * self.decay;
        let sum = fx + a * self.decay;
        let g_plus = 0.5 * (sum + sqrt_d);
        let g_minus = fx / g_plus;
        let d_plus = (sqrt_d + c) / (2.0 * sqrt_d);
        let gap_plus = x * self.decay - g_plus;
        let gap_minus = x - g_minus;
        // Grouped so that no intermediate leaves the floating-point range
        // when f(x) is of order e^{-2t}.
        let plus = d_plus * (fx / gap_plus) / gap_plus;
        let minus = -2.0 * (1.0 - a) * (fx / sqrt_d) / ((sqrt_d + c) * gap_minus * gap_minus);
        plus - minus
    }

    fn prefactor(&self, t: f64) -> f64 {
        8.0 * t * self.decay
    }
}

fn check_rho_args(op: &'static str, l: f64, t: f64) -> Result<()> {
    check_length(op, l)?;
    if !(t.is_finite() && t <= MAX_T) {
        return Err(Error::domain(op, t, "t <= 300"));
    }
    Ok(())
}

/// Breakpoints in `ψ ∈ (0, π/2)` accumulating geometrically at 0, so the
/// adaptive rule sees the features at scale `e^{-t}` near a branch point
/// from the start.
fn endpoint_breakpoints(t: f64) -> Vec<f64> {
    let depth = (8.0 + (t / std::f64::consts::LN_2).ceil()).min(1000.0) as i32;
    (1..=depth).rev().map(|k| 0.5 * PI * 2f64.powi(-k)).collect()
}

/// `rho(l, t)` with the requested relative accuracy.
///
/// Each half of the `x`-range is parametrized from its own endpoint by
/// `|x - x_end| = (x_hi - x_lo) sin²(ψ/2)`, `ψ ∈ (0, π/2]`, which removes the
/// inverse-square-root singularity there; the smooth results are
/// integrated by adaptive Gauss–Kronrod.
pub fn rho_with_tol(l: f64, t: f64, rel_tol: f64) -> Result<f64> {
    check_rho_args("rho", l, t)?;
    if t <= l {
        return Ok(0.0);
    }
    let integrand = RhoIntegrand::new(l, t)?;
    let span = integrand.span();
    let breaks = endpoint_breakpoints(t);
    let half = |from_upper: bool| {
        gauss_kronrod(
            |psi| {
                let (s, c) = (0.5 * psi).sin_cos();
                let near = span * s * s;
                let far = span * c * c;
                let value = if from_upper {
                    integrand.eval(integrand.x_hi - near, far, near)
                } else {
                    integrand.eval(integrand.x_lo + near, near, far)
                };
                value * 0.5 * span * psi.sin()
            },
            0.0,
            0.5 * PI,
            &breaks,
            Tolerance::relative(rel_tol),
            20_000,
        )
    };
    let total = half(false)?.value + half(true)?.value;
    Ok(integrand.prefactor(t) * total)
}

/// `rho(l, t)` at the default tolerance.
pub fn rho(l: f64, t: f64) -> Result<f64> {
    rho_with_tol(l, t, Tolerances::default().quadrature_tol)
}

/// Second route to `rho(l, t)`: tanh-sinh directly in `x`, which absorbs
/// the endpoint singularities through its double-exponential node
/// clustering.
pub fn rho_tanh_sinh(l: f64, t: f64, rel_tol: f64) -> Result<f64> {
    check_rho_args("rho_tanh_sinh", l, t)?;
    if t <= l {
        return Ok(0.0);
    }
    let integrand = RhoIntegrand::new(l, t)?;
    let est = tanh_sinh(
        |x, from_lo, to_hi| integrand.eval(x, from_lo, to_hi),
        integrand.x_lo,
        integrand.x_hi,
        Tolerance::relative(rel_tol),
        14,
    )?;
    Ok(integrand.prefactor(t) * est.value)
}

/// `∫_{t0}^{t1} rho(l, t) dt`.
pub fn rho_window_mass(l: f64, t0: f64, t1: f64, rel_tol: f64) -> Result<f64> {
    check_length("rho_window_mass", l)?;
    if t0.is_nan() || t1.is_nan() || t0 > t1 {
        return Err(Error::domain("rho_window_mass", t1, "t0 <= t1"));
    }
    let lo = t0.max(l);
    if t1 <= lo {
        return Ok(0.0);
    }
    let mut breaks: Vec<f64> = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|d| l + d)
        .collect();
    breaks.retain(|&b| b > lo && b < t1);
    let inner_tol = (rel_tol * 1e-3).max(1e-13);
    let mut failure = None;
    let est = gauss_kronrod(
        |t| match rho_with_tol(l, t, inner_tol) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        t1,
        &breaks,
        Tolerance::new(1e-15, rel_tol),
        2_000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

/// Mass of `rho(l, ·)`, with the range cut off where the large-`t`
/// envelope `16 t² e^{-2t} r` falls below `threshold` and the envelope's
/// integral beyond the cut added back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassIntegral {
    pub integrated: f64,
    pub cutoff: f64,
    pub tail: f64,
    pub total: f64,
}

pub fn rho_mass(l: f64, tolerances: &Tolerances) -> Result<MassIntegral> {
    check_length("rho_mass", l)?;
    let ratio = asymptotic_r(l)?.max(asymptotic_ratio_limit(l)?).max(1.0);
    let envelope = |t: f64| 16.0 * t * t * (-2.0 * t).exp() * ratio;
    let mut cutoff = l.max(1.0);
    while envelope(cutoff) >= tolerances.tail_threshold {
        cutoff += 0.25;
    }
    let integrated = rho_window_mass(l, l, cutoff, 1e-10)?;
    let tail = 16.0 * ratio * (-2.0 * cutoff).exp() * (cutoff * cutoff / 2.0 + cutoff / 2.0 + 0.25);
    Ok(MassIntegral {
        integrated,
        cutoff,
        tail,
        total: integrated + tail,
    })
}

/// `F(l) = 8 L(1/cosh²(l/2))`, cross-checked against `-8 L(-1/sinh²(l/2))`.
pub fn total_mass_f(l: f64) -> Result<f64> {
    check_length("total_mass_f", l)?;
    let c = (l / 2.0).cosh();
    let b = 1.0 / (c * c);
    let cosh_form = if b <= 0.5 {
        8.0 * rogers_l(b)?
    } else {
        let th = (l / 2.0).tanh();
        8.0 * (ZETA2 - rogers_l(th * th)?)
    };
    let sinh_form = -8.0 * rogers_l(a_from_length(l)?)?;
    let diff = (cosh_form - sinh_form).abs();
    if diff > 1e-11 {
        return Err(Error::Inconsistent {
            what: "F(l) in the cosh and sinh charts",
            diff,
        });
    }
    Ok(cosh_form)
}

fn check_a(op: &'static str, a: f64) -> Result<()> {
    if a < 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, a, "-∞ < a < 0"))
    }
}

/// `G(a) = -4 L(a)`.
pub fn big_g(a: f64) -> Result<f64> {
    check_a("big_g", a)?;
    Ok(-4.0 * rogers_l(a)?)
}

/// `ln |y(y - a)(x - 1)/(x(x - a)(y - 1))|` from its positive factors.
fn log_kernel(y: f64, y_minus_a: f64, y_minus_1: f64, one_minus_x: f64, neg_x: f64, x_minus_a: f64) -> f64 {
    y.ln() + y_minus_a.ln() + one_minus_x.ln() - neg_x.ln() - x_minus_a.ln() - y_minus_1.ln()
}

fn inner_quadrature(y: f64, y_minus_1: f64, a: f64, rel_tol: f64) -> Result<f64> {
    let y_minus_a = y - a;
    tanh_sinh(
        |_, x_minus_a, neg_x| {
            let gap = y + neg_x;
            log_kernel(y, y_minus_a, y_minus_1, 1.0 + neg_x, neg_x, x_minus_a) / (gap * gap)
        },
        a,
        0.0,
        Tolerance::new(1e-300, rel_tol),
        12,
    )
    .map(|e| e.value)
}

/// `I(y) = ∫_a^0 ln|y(y - a)(x - 1)/(x(x - a)(y - 1))| dx/(x - y)²` by
/// tanh-sinh quadrature.
pub fn inner_integral_i_quadrature(y: f64, a: f64) -> Result<f64> {
    check_a("inner_integral_i_quadrature", a)?;
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::domain("inner_integral_i_quadrature", y, "1 < y < ∞"));
    }
    inner_quadrature(y, y - 1.0, a, 1e-12)
}

/// `I(y)` in closed form, as three brackets of logarithms.
pub fn inner_integral_i(y: f64, a: f64) -> Result<f64> {
    check_a("inner_integral_i", a)?;
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::domain("inner_integral_i", y, "1 < y < ∞"));
    }
    let ym1 = y - 1.0;
    let yma = y - a;
    let first = y.ln() / ym1 - ym1.ln() / y;
    let second = 2.0 * ((yma / -a).ln() / y - (y / -a).ln() / yma);
    let third = (ym1 / (1.0 - a)).ln() / yma - (yma / (1.0 - a)).ln() / ym1;
    Ok(first + second + third)
}

/// `J(y) = -2L(1 - y) - 4L(y/a) + 2L((1 - y)/(1 - a))`, an antiderivative of
/// `I` in `y`.
pub fn j_combination(y: f64, a: f64) -> Result<f64> {
    check_a("j_combination", a)?;
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::domain("j_combination", y, "1 < y < ∞"));
    }
    Ok(-2.0 * rogers_l(1.0 - y)? - 4.0 * rogers_l(y / a)? + 2.0 * rogers_l((1.0 - y) / (1.0 - a))?)
}

/// `lim_{y→1⁺} J(y) = -4 L(1/a)`.
pub fn j_limit_at_one(a: f64) -> Result<f64> {
    check_a("j_limit_at_one", a)?;
    Ok(-4.0 * rogers_l(1.0 / a)?)
}

/// `lim_{y→∞} J(y) = -4 L(-∞) = 2π²/3`.
pub fn j_limit_at_infinity() -> f64 {
    -4.0 * rogers_l_infinity()
}

/// `G(a)` as a double integral over `(a, 0) × (1, ∞)`, the outer variable
/// mapped to `(0, 1)` by `y = 1 + u/(1 - u)`.
pub fn big_g_quadrature(a: f64) -> Result<f64> {
    check_a("big_g_quadrature", a)?;
    let mut failure = None;
    let est = tanh_sinh(
        |_, u, one_minus_u| {
            let y = 1.0 / one_minus_u;
            let y_minus_1 = u / one_minus_u;
            match inner_quadrature(y, y_minus_1, a, 1e-11) {
                Ok(v) => v * y * y,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        Tolerance::relative(1e-10),
        10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

/// Large-`t` ratio `rho(l, t)/(16 t² e^{-2t})` in the printed form
/// `(-2a² + 5a - 2)/(a(1 - a))` with `a = -1/sinh²(l/2)`.
pub fn asymptotic_r(l: f64) -> Result<f64> {
    let a = a_from_length(l)?;
    Ok((-2.0 * a * a + 5.0 * a - 2.0) / (a * (1.0 - a)))
}

/// The limit of `rho(l, t)/(16 t² e^{-2t})` as `t → ∞`, `2 cosh l`.
///
/// Near the upper end of the `x`-range the smaller inverse branch behaves
/// as `g₋(w) = 1 + (1 - a)/w + O(w⁻²)`; keeping the second-order term gives
/// the weight `(1 + (1 - a)/(x - 1)²)` and the limit `2(2 - a)/(-a)`. The
/// approach is like `1/t`.
pub fn asymptotic_ratio_limit(l: f64) -> Result<f64> {
    check_length("asymptotic_ratio_limit", l)?;
    Ok(2.0 * l.cosh())
}

/// `rho(l, t)/(16 t² e^{-2t})`.
pub fn asymptotic_ratio(l: f64, t: f64) -> Result<f64> {
    let value = rho_with_tol(l, t, 1e-10)?;
    Ok(value / (16.0 * t * t * (-2.0 * t).exp()))
}

/// `8 |L(t)|`: the Liouville volume of the set of geodesics crossing two
/// geodesics whose endpoints have cross-ratio `t`.
pub fn volume_c(t_param: f64) -> Result<f64> {
    if t_param.is_nan() || t_param > 1.0 || t_param == 0.0 {
        return Err(Error::domain("volume_c", t_param, "t <= 1, t != 0"));
    }
    Ok(8.0 * rogers_l(t_param)?.abs())
}

/// Cusp density of the polygon plus the density of every orthogeodesic.
pub fn predicted_density(p: &IdealPolygon, t: f64) -> Result<f64> {
    let mut total = cusp_density(p.cusp_count(), t)?;
    for e in orthospectrum(p).entries {
        total += rho(e.l, t)?;
    }
    Ok(total)
}

/// Mass of [`predicted_density`] from the closed forms: cusps plus `F(l)`
/// per orthogeodesic.
pub fn predicted_total_mass(p: &IdealPolygon) -> Result<f64> {
    let mut total = cusp_mass(p.cusp_count());
    for e in orthospectrum(p).entries {
        total += total_mass_f(e.l)?;
    }
    Ok(total)
}

/// Mass of [`predicted_density`] by integrating each term numerically.
pub fn predicted_mass_by_quadrature(p: &IdealPolygon, tolerances: &Tolerances) -> Result<f64> {
    let cusp = gauss_kronrod(
        |t| {
            if t > 0.0 {
                cusp_density(1, t).unwrap_or(0.0)
            } else {
                4.0
            }
        },
        0.0,
        60.0,
        &[1.0, 5.0, 20.0],
        Tolerance::relative(1e-12),
        1000,
    )?;
    let lengths = orthospectrum(p).lengths();
    let ortho: Vec<f64> = lengths
        .par_iter()
        .map(|&l| rho_mass(l, tolerances).map(|m| m.total))
        .collect::<Result<_>>()?;
    Ok(p.cusp_count() as f64 * cusp.value + ortho.iter().sum::<f64>())
}

/// `4π²|χ|`, the Liouville volume of geodesics meeting the polygon.
pub fn polygon_volume(p: &IdealPolygon) -> f64 {
    4.0 * PI * PI * p.euler_characteristic_abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DensitySource {
    Ortho { l: f64 },
    Cusp { count: usize },
}

/// Density values on a grid of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub source: DensitySource,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature_tol: f64,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::domain("density grid", t, "0 < t < ∞"));
    }
    if let Some(w) = t_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::domain("density grid", w[1], "strictly increasing"));
    }
    Ok(())
}

/// `rho(l, t)` over the grid, evaluated in parallel; the output order is
/// the grid order.
pub fn rho_profile(l: f64, t_grid: &[f64], quadrature_tol: f64) -> Result<DensityProfile> {
    check_length("rho_profile", l)?;
    check_grid(t_grid)?;
    let values = t_grid
        .par_iter()
        .map(|&t| rho_with_tol(l, t, quadrature_tol))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityProfile {
        source: DensitySource::Ortho { l },
        t_grid: t_grid.to_vec(),
        values,
        quadrature_tol,
    })
}

/// `∫_0^{t_k} rho(l, t) dt` at every grid point, summing window masses
/// between consecutive points (computed in parallel).
pub fn rho_cumulative_mass(l: f64, t_grid: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    check_length("rho_cumulative_mass", l)?;
    check_grid(t_grid)?;
    let windows = t_grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| rho_window_mass(l, if k == 0 { 0.0 } else { t_grid[k - 1] }, t, rel_tol))
        .collect::<Result<Vec<f64>>>()?;
    Ok(windows
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect())
}

pub fn cusp_profile(count: usize, t_grid: &[f64]) -> Result<DensityProfile> {
    check_grid(t_grid)?;
    let values = t_grid.iter().map(|&t| cusp_density(count, t)).collect::<Result<_>>()?;
    Ok(DensityProfile {
        source: DensitySource::Cusp { count },
        t_grid: t_grid.to_vec(),
        values,
        quadrature_tol: 0.0,
    })
}

impl DensityProfile {
    /// Trapezoid rule over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.t_grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    /// CSV with columns `l,t,rho`; for a cusp profile the `l` column is
    /// empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Degenerate(format!("csv output: {e}"));
        w.write_record(["l", "t", "rho"]).map_err(io)?;
        let l = match self.source {
            DensitySource::Ortho { l } => fmt17(l),
            DensitySource::Cusp { .. } => String::new(),
        };
        for (t, v) in self.t_grid.iter().zip(&self.values) {
            w.write_record([l.as_str(), &fmt17(*t), &fmt17(*v)]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Degenerate(format!("csv output: {e}")))?;
        Ok(())
    }
}

/// One row of the table comparing the double integral with `-4 L(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub a: f64,
    pub g_quadrature: f64,
    pub g_closed: f64,
}

pub fn oracle_table(values: &[f64]) -> Result<Vec<OracleRow>> {
    values
        .par_iter()
        .map(|&a| {
            Ok(OracleRow {
                a,
                g_quadrature: big_g_quadrature(a)?,
                g_closed: big_g(a)?,
            })
        })
        .collect()
}

/// CSV with columns `a,G_quadrature,G_closed`.
pub fn write_oracle_csv<W: Write>(rows: &[OracleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Degenerate(format!("csv output: {e}"));
    w.write_record(["a", "G_quadrature", "G_closed"]).map_err(io)?;
    for r in rows {
        w.write_record([fmt17(r.a), fmt17(r.g_quadrature), fmt17(r.g_closed)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Degenerate(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::length_from_b;
    use crate::polygon::regular_polygon;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn cusp_density_values() {
        assert!((cusp_density(1, 1e-8).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(cusp_density(0, 2.0).unwrap(), 0.0);
        let t: f64 = 1.3;
        assert!(rel(cusp_density(3, t).unwrap(), 12.0 * t * t / t.sinh().powi(2)) < 1e-14);
        assert!(cusp_density(1, 800.0).unwrap() >= 0.0);
        assert!(cusp_density(1, 0.0).is_err());
        let mass = gauss_kronrod(
            |t| cusp_density(1, t.max(1e-300)).unwrap(),
            0.0,
            60.0,
            &[1.0, 5.0, 20.0],
            Tolerance::relative(1e-12),
            500,
        )
        .unwrap();
        assert!((mass.value - 2.0 * PI * PI / 3.0).abs() < 1e-8);
        assert_eq!(cusp_mass(1), 2.0 * PI * PI / 3.0);
    }

    #[test]
    fn rho_support_and_sign() {
        assert_eq!(rho(1.0, 0.5).unwrap(), 0.0);
        assert_eq!(rho(1.0, 1.0).unwrap(), 0.0);
        for &t in &[1.0 + 1e-9, 1.001, 1.5, 3.0, 10.0, 40.0] {
            assert!(rho(1.0, t).unwrap() > 0.0, "t = {t}");
        }
        assert!(rho(1.0, MAX_T + 1.0).is_err());
        assert!(rho(-1.0, 2.0).is_err());
    }

    #[test]
    fn rho_routes_agree() {
        for &(l, t) in &[
            (0.5, 0.6),
            (0.5, 3.0),
            (1.0, 1.0001),
            (1.0, 2.0),
            (2.0, 7.0),
            (4.0, 4.5),
            (1.0, 30.0),
        ] {
            let gk = rho_with_tol(l, t, 1e-12).unwrap();
            let ts = rho_tanh_sinh(l, t, 1e-12).unwrap();
            assert!(rel(gk, ts) < 1e-9, "l = {l}, t = {t}: {gk} vs {ts}");
        }
    }

    #[test]
    fn rho_large_t_is_finite() {
        let v = rho_with_tol(1.0, 300.0, 1e-9).unwrap();
        let ratio = v / (16.0 * 300.0f64.powi(2) * (-600.0f64).exp());
        assert!(ratio.is_finite() && ratio > 0.0);
        assert!((ratio - asymptotic_ratio_limit(1.0).unwrap()).abs() < 1e-3 * ratio);
        assert!(rho_tanh_sinh(1.0, 300.0, 1e-9).unwrap() > 0.0);
    }

    #[test]
    fn mass_closure_unit_length() {
        let m = rho_mass(1.0, &Tolerances::default()).unwrap();
        let f = total_mass_f(1.0).unwrap();
        assert!((m.total - f).abs() < 1e-6, "{m:?} vs {f}");
        assert!(m.tail < 1e-11);
    }

    #[test]
    fn total_mass_values() {
        let l_half = length_from_b(0.5).unwrap();
        assert!((total_mass_f(l_half).unwrap() - 2.0 * PI * PI / 3.0).abs() < 1e-13);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let l_pent = length_from_b(1.0 / (phi * phi)).unwrap();
        assert!((total_mass_f(l_pent).unwrap() - 8.0 * PI * PI / 15.0).abs() < 1e-13);
        assert!((total_mass_f(1e-9).unwrap() - 8.0 * ZETA2).abs() < 1e-12);
        for &l in &[1e-6, 0.1, 1.0, 5.0, 30.0] {
            assert!(total_mass_f(l).is_ok());
        }
    }

    #[test]
    fn big_g_values() {
        assert!((big_g(-1.0).unwrap() - PI * PI / 3.0).abs() < 1e-14);
        assert!(big_g(-1e-12).unwrap().abs() < 1e-9);
        for &a in &[-0.2, -1.0, -3.7, -50.0] {
            let sum = big_g(a).unwrap() + big_g(1.0 / a).unwrap();
            assert!((sum - 2.0 * PI * PI / 3.0).abs() < 1e-12);
        }
        assert!(big_g(0.5).is_err());
    }

    #[test]
    fn big_g_oracle() {
        for &a in &[-0.1, -1.0, -10.0] {
            let q = big_g_quadrature(a).unwrap();
            assert!((q - big_g(a).unwrap()).abs() < 1e-6, "a = {a}: {q}");
            let via_j = j_limit_at_infinity() - j_limit_at_one(a).unwrap();
            assert!((q - via_j).abs() < 1e-6);
        }
    }

    #[test]
    fn inner_integral_forms_agree() {
        for &(y, a) in &[(2.0, -1.0), (1.01, -0.3), (7.5, -12.0), (150.0, -2.0)] {
            let closed = inner_integral_i(y, a).unwrap();
            let numeric = inner_integral_i_quadrature(y, a).unwrap();
            assert!((closed - numeric).abs() < 1e-8, "({y}, {a}): {closed} vs {numeric}");
        }
        assert!(inner_integral_i(1e7, -1.0).unwrap().abs() < 1e-5);
    }

    #[test]
    fn j_limits() {
        for &a in &[-0.1, -1.0, -10.0] {
            let near_one = j_combination(1.0 + 1e-12, a).unwrap();
            assert!((near_one - j_limit_at_one(a).unwrap()).abs() < 1e-9);
            let far = j_combination(1e12, a).unwrap();
            assert!((far - j_limit_at_infinity()).abs() < 1e-9);
        }
        assert!((j_limit_at_infinity() - 2.0 * PI * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_mass_reaches_total() {
        let grid: Vec<f64> = (1..=400).map(|k| 0.1 * k as f64).collect();
        let cum = rho_cumulative_mass(1.0, &grid, 1e-10).unwrap();
        assert!(cum[..9].iter().all(|&m| m == 0.0));
        assert!(cum.windows(2).all(|w| w[1] >= w[0]));
        assert!((cum[399] - total_mass_f(1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn j_is_antiderivative() {
        let h = 1e-5;
        for &a in &[-0.1, -1.0, -10.0] {
            for &y in &[1.1, 2.0, 5.0, 20.0] {
                let fd = (j_combination(y + h, a).unwrap() - j_combination(y - h, a).unwrap()) / (2.0 * h);
                assert!((fd - inner_integral_i(y, a).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn asymptotic_r_values() {
        let l = length_from_b(0.5).unwrap();
        assert!((asymptotic_r(l).unwrap() - 4.5).abs() < 1e-12);
        assert!((asymptotic_ratio_limit(l).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn volume_values() {
        assert!((volume_c(0.5).unwrap() - 2.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((volume_c(-1.0).unwrap() - 2.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(volume_c(1e-15).unwrap() < 1e-12);
        assert!(volume_c(0.0).is_err());
        assert!(volume_c(1.5).is_err());
    }

    #[test]
    fn mass_budget() {
        for n in 3..=8 {
            let p = regular_polygon(n).unwrap();
            let ortho: f64 = orthospectrum(&p)
                .lengths()
                .iter()
                .map(|&l| total_mass_f(l).unwrap())
                .sum();
            let budget = 2.0 * PI * PI / 3.0 * (6.0 * p.euler_characteristic_abs() - n as f64);
            assert!((ortho - budget).abs() < 1e-10);
            assert!((predicted_total_mass(&p).unwrap() - polygon_volume(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn profiles() {
        // rho jumps from 0 to a positive value at t = l, so the grid starts
        // just past the jump.
        let mut grid = vec![0.5, 0.9, 1.0];
        grid.extend((0..=1000).map(|k| 1.0 + 1e-9 + 0.02 * k as f64));
        let p = rho_profile(1.0, &grid, 1e-8).unwrap();
        assert!(p.values[..3].iter().all(|&v| v == 0.0));
        assert!(p.values[3] > 10.0);
        assert!(p.values.iter().all(|&v| v >= 0.0));
        let f = total_mass_f(1.0).unwrap();
        assert!((p.trapezoid_mass() - f).abs() < 1e-3 * f);
        assert!(rho_profile(1.0, &[1.0, 1.0], 1e-8).is_err());

        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("l,t,rho"));
        let row: Vec<f64> = lines.nth(30).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![1.0, grid[30], p.values[30]]);

        let fine: Vec<f64> = (1..=4000).map(|k| 0.01 * k as f64).collect();
        let c = cusp_profile(2, &fine).unwrap();
        // The grid omits (0, 0.01), where the density is close to 8.
        assert!((c.trapezoid_mass() + 0.08 - cusp_mass(2)).abs() < 1e-3);
    }
}
