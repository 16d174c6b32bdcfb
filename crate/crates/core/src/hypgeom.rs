//! Normalized ideal quadrilaterals and triangles in the upper half-plane.
//!
//! A pair of disjoint geodesics at distance `l` is normalized either to the
//! quadrilateral with vertices `a, 0, 1, ∞` (`a < 0`) or to `0, b, 1, ∞`
//! (`0 < b < 1`). The intersection length of the geodesic `g(x, y)` with the
//! `a`-quadrilateral is `½ ln(f(y) / f(x))` with `f(x) = x(x - a)/(x - 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the extended real line, the boundary of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        if x.is_infinite() {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(x)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl ExtReal {
    /// Position on the unit circle under the Cayley map `z -> (z - i)/(z + i)`,
    /// as an angle in `[0, 2π)`. `∞` goes to angle 0 and the map preserves
    /// the cyclic order.
    pub fn to_angle(self) -> f64 {
        match self {
            ExtReal::Infinity => 0.0,
            ExtReal::Finite(x) => 2.0 * std::f64::consts::PI - 2.0 * 1f64.atan2(x),
        }
    }

    /// Inverse of [`ExtReal::to_angle`]: `x = -cot(θ/2)`.
    pub fn from_angle(theta: f64) -> Self {
        let half = theta.rem_euclid(2.0 * std::f64::consts::PI) / 2.0;
        if half == 0.0 {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(-half.cos() / half.sin())
        }
    }
}

/// A real Möbius transformation `x -> (p x + q) / (r x + s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMobius {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl RealMobius {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        if p * s - q * r == 0.0 {
            return Err(Error::Degenerate("Möbius map with zero determinant".into()));
        }
        Ok(RealMobius { p, q, r, s })
    }

    pub fn apply(&self, z: ExtReal) -> ExtReal {
        match z {
            ExtReal::Infinity if self.r == 0.0 => ExtReal::Infinity,
            ExtReal::Infinity => ExtReal::Finite(self.p / self.r),
            ExtReal::Finite(x) => {
                let den = self.r * x + self.s;
                if den == 0.0 {
                    ExtReal::Infinity
                } else {
                    ExtReal::Finite((self.p * x + self.q) / den)
                }
            }
        }
    }
}

/// The three equivalent parameters of a normalized ideal quadrilateral whose
/// opposite sides are at distance `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadChart {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl QuadChart {
    pub fn from_length(l: f64) -> Result<Self> {
        Ok(QuadChart {
            l,
            a: a_from_length(l)?,
            b: b_from_length(l)?,
        })
    }

    pub fn from_a(a: f64) -> Result<Self> {
        let l = length_from_a(a)?;
        Ok(QuadChart {
            l,
            a,
            b: -a / (1.0 - a),
        })
    }

    pub fn from_b(b: f64) -> Result<Self> {
        let l = length_from_b(b)?;
        Ok(QuadChart {
            l,
            a: -b / (1.0 - b),
            b,
        })
    }
}

fn check_length(op: &'static str, l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, l, "0 < l < ∞"))
    }
}

fn check_a(op: &'static str, a: f64) -> Result<()> {
    if a < 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, a, "-∞ < a < 0"))
    }
}

/// `a = -1 / sinh²(l/2)`.
pub fn a_from_length(l: f64) -> Result<f64> {
    check_length("a_from_length", l)?;
    let s = (l / 2.0).sinh();
    Ok(-1.0 / (s * s))
}

/// `b = 1 / cosh²(l/2)`.
pub fn b_from_length(l: f64) -> Result<f64> {
    check_length("b_from_length", l)?;
    let c = (l / 2.0).cosh();
    Ok(1.0 / (c * c))
}

pub fn length_from_a(a: f64) -> Result<f64> {
    check_a("length_from_a", a)?;
    Ok(2.0 * (1.0 / (-a).sqrt()).asinh())
}

pub fn length_from_b(b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::domain("length_from_b", b, "0 < b < 1"));
    }
    // sinh²(l/2) = (1 - b)/b keeps precision as b -> 1.
    Ok(2.0 * ((1.0 - b) / b).sqrt().asinh())
}

/// Cross-ratio `[z1, z2, z3, z4] = (z1 - z2)(z4 - z3) / ((z1 - z3)(z4 - z2))`.
///
/// A point at infinity cancels the two factors that contain it.
pub fn cross_ratio(z1: ExtReal, z2: ExtReal, z3: ExtReal, z4: ExtReal) -> Result<f64> {
    use ExtReal::{Finite as F, Infinity as I};
    let pts = [z1, z2, z3, z4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i] == pts[j] {
                return Err(Error::Degenerate(format!(
                    "cross-ratio with coincident points {} and {}",
                    pts[i], pts[j]
                )));
            }
        }
    }
    Ok(match pts {
        [F(a), F(b), F(c), F(d)] => (a - b) * (d - c) / ((a - c) * (d - b)),
        [I, F(b), F(c), F(d)] => (d - c) / (d - b),
        [F(a), I, F(c), F(d)] => (d - c) / (a - c),
        [F(a), F(b), I, F(d)] => (a - b) / (d - b),
        [F(a), F(b), F(c), I] => (a - b) / (a - c),
        _ => unreachable!("two infinite points rejected above"),
    })
}

/// Cross-ratio of four points `e^{iθ_k}` of the unit circle. The complex
/// phases cancel, leaving a ratio of half-angle sines.
pub fn cross_ratio_angles(t1: f64, t2: f64, t3: f64, t4: f64) -> Result<f64> {
    let tau = 2.0 * std::f64::consts::PI;
    let pts = [t1, t2, t3, t4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (pts[i] - pts[j]).rem_euclid(tau) == 0.0 {
                return Err(Error::Degenerate(format!(
                    "cross-ratio with coincident angles {} and {}",
                    pts[i], pts[j]
                )));
            }
        }
    }
    let s = |u: f64, v: f64| ((u - v) / 2.0).sin();
    Ok(s(t1, t2) * s(t4, t3) / (s(t1, t3) * s(t4, t2)))
}

/// `f(x) = x(x - a)/(x - 1)`.
pub fn f_rational(x: f64, a: f64) -> Result<f64> {
    check_a("f_rational", a)?;
    if x == 1.0 {
        return Err(Error::Pole(x));
    }
    Ok(x * (x - a) / (x - 1.0))
}

/// Critical points of `f`: the maximum on `(a, 0)` and the minimum on
/// `(1, ∞)`, with the critical values in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPair {
    pub x0: f64,
    pub y0: f64,
    pub f_x0: f64,
    pub f_y0: f64,
}

pub fn critical_points(a: f64) -> Result<CriticalPair> {
    check_a("critical_points", a)?;
    let s = (1.0 - a).sqrt();
    // 1 - s without cancellation as a -> 0⁻.
    let x0 = a / (1.0 + s);
    Ok(CriticalPair {
        x0,
        y0: 1.0 + s,
        f_x0: x0 * x0,
        f_y0: (1.0 + s) * (1.0 + s),
    })
}

/// Which root of `f(y) = w` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// The two roots of `y² - (a + w) y + w = 0`, smaller first, together with
/// `√D` where `D = (w - f(x0))(w - f(y0))` is the discriminant.
pub(crate) fn inverse_roots(w: f64, a: f64, crit: &CriticalPair) -> Result<(f64, f64, f64)> {
    if w.is_nan() {
        return Err(Error::domain("g_inverse", w, "real w"));
    }
    if w > crit.f_x0 && w < crit.f_y0 {
        return Err(Error::BranchGap {
            w,
            lo: crit.f_x0,
            hi: crit.f_y0,
        });
    }
    let sqrt_d = ((w - crit.f_x0) * (w - crit.f_y0)).sqrt();
    let sum = a + w;
    let (lo, hi) = if sum >= 0.0 {
        let big = 0.5 * (sum + sqrt_d);
        (w / big, big)
    } else {
        let small = 0.5 * (sum - sqrt_d);
        (small, w / small)
    };
    Ok((lo, hi, sqrt_d))
}

/// `g±(w)`: the inverse branches of `f`, real for `w <= f(x0)` or
/// `w >= f(y0)`. `Minus` gives the smaller root.
pub fn g_inverse(w: f64, a: f64, branch: Branch) -> Result<f64> {
    let crit = critical_points(a)?;
    let (lo, hi, _) = inverse_roots(w, a, &crit)?;
    Ok(match branch {
        Branch::Plus => hi,
        Branch::Minus => lo,
    })
}

/// `g±'(w) = (√D ± c) / (2√D)` with `c = w + a - 2`, rewritten through
/// `D - c² = -4(1 - a)` whenever the direct form would cancel.
pub(crate) fn branch_derivatives(w: f64, a: f64, sqrt_d: f64) -> (f64, f64) {
    let c = w + a - 2.0;
    let plus_minus = |sign: f64| {
        let sc = sign * c;
        if sc >= 0.0 {
            (sqrt_d + sc) / (2.0 * sqrt_d)
        } else {
            -2.0 * (1.0 - a) / (sqrt_d * (sqrt_d - sc))
        }
    };
    (plus_minus(-1.0), plus_minus(1.0))
}

/// Derivative of `g±` at `w`; infinite at the critical values.
pub fn g_inverse_derivative(w: f64, a: f64, branch: Branch) -> Result<f64> {
    let crit = critical_points(a)?;
    let (_, _, sqrt_d) = inverse_roots(w, a, &crit)?;
    let (minus, plus) = branch_derivatives(w, a, sqrt_d);
    Ok(match branch {
        Branch::Plus => plus,
        Branch::Minus => minus,
    })
}

/// `½ ln(y (y - a)(1 - x) / ((-x)(x - a)(y - 1)))` from its six positive
/// factors, so callers holding differences to the corners keep full
/// precision.
pub(crate) fn length_from_factors(
    y: f64,
    y_minus_a: f64,
    one_minus_x: f64,
    neg_x: f64,
    x_minus_a: f64,
    y_minus_one: f64,
) -> f64 {
    0.5 * ((y / y_minus_one) * (y_minus_a / x_minus_a) * (one_minus_x / neg_x)).ln()
}

/// Length of `g(x, y) ∩ Q_a` for `(x, y)` in `(a, 0) × (1, ∞)`.
pub fn intersection_length(x: f64, y: f64, a: f64) -> Result<f64> {
    check_a("intersection_length", a)?;
    if !(x > a && x < 0.0) {
        return Err(Error::domain("intersection_length", x, "a < x < 0"));
    }
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::domain("intersection_length", y, "1 < y < ∞"));
    }
    Ok(length_from_factors(y, y - a, 1.0 - x, -x, x - a, y - 1.0))
}

/// Length of `g(x, y)` inside the ideal triangle `(0, 1, ∞)` for
/// `x < 0 < y < 1`.
pub fn triangle_length_l1(x: f64, y: f64) -> Result<f64> {
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::domain("triangle_length_l1", x, "x < 0"));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain("triangle_length_l1", y, "0 < y < 1"));
    }
    Ok(0.5 * ((1.0 - x) / (1.0 - y)).ln())
}

/// Length of `g(x, y)` inside the ideal triangle `(0, 1, ∞)` for
/// `x < 0` and `y > 1`.
pub fn triangle_length_l2(x: f64, y: f64) -> Result<f64> {
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::domain("triangle_length_l2", x, "x < 0"));
    }
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::domain("triangle_length_l2", y, "y > 1"));
    }
    Ok(0.5 * ((y / (y - 1.0)) * ((1.0 - x) / -x)).ln())
}
