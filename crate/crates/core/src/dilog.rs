//! Polylogarithms and the extended Rogers L-function on the real line.
//!
//! Every evaluation reduces its argument into `|x| <= 1/2`, where the power
//! series converges at least like `2^-n`, using the classical functional
//! equations (reflection, Landen, inversion). `li2` and `rogers_l` are routed
//! independently so that the identity `L(x) = Li2(x) + ½ log|x| log(1 - x)`
//! can be used as a check between the two.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `ζ(2) = π²/6`, which is also `L(1)`.
pub const ZETA2: f64 = PI * PI / 6.0;

/// Even Bernoulli numbers `B_2, B_4, ..., B_30`.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Argument of the extended Rogers L-function: any real `x <= 1`
/// (including `-∞`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RogersArg(f64);

impl RogersArg {
    pub fn new(x: f64) -> Result<Self> {
        if x <= 1.0 {
            Ok(RogersArg(x))
        } else {
            Err(Error::domain("rogers_l", x, "x <= 1"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn rogers_l(self) -> f64 {
        rogers_l_reduced(self.0)
    }

    pub fn li2(self) -> f64 {
        li2_reduced(self.0)
    }
}

impl TryFrom<f64> for RogersArg {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        RogersArg::new(x)
    }
}

/// Sum of `x^n / n^k` for `n >= 1`. Only used on `|x| <= 1/2`.
fn power_series(k: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xn = x;
    let mut n = 1u32;
    while xn.abs() > 1e-20 && n < 200 {
        sum += xn / f64::from(n).powi(k as i32);
        xn *= x;
        n += 1;
    }
    sum
}

fn li2_reduced(x: f64) -> f64 {
    if x == 1.0 {
        ZETA2
    } else if x.abs() <= 0.5 {
        power_series(2, x)
    } else if x > 0.5 {
        // Euler reflection; 1 - x is exact here.
        ZETA2 - x.ln() * (1.0 - x).ln() - power_series(2, 1.0 - x)
    } else if x >= -1.0 {
        // Landen: x/(x-1) lands in [1/3, 1/2].
        let l1 = (-x).ln_1p();
        -power_series(2, x / (x - 1.0)) - 0.5 * l1 * l1
    } else {
        // Inversion into (-1, 0).
        let lx = (-x).ln();
        -ZETA2 - 0.5 * lx * lx - li2_reduced(1.0 / x)
    }
}

fn rogers_l_reduced(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x == 1.0 {
        ZETA2
    } else if x > 0.0 && x <= 0.5 {
        power_series(2, x) + 0.5 * x.ln() * (-x).ln_1p()
    } else if x > 0.5 {
        ZETA2 - rogers_l_reduced(1.0 - x)
    } else if x >= -1.0 {
        // L(x) = -L(x/(x-1)) with x/(x-1) in (0, 1/2].
        -rogers_l_reduced(x / (x - 1.0))
    } else {
        // L(x) + L(1/x) = -π²/6 for x < 0.
        -ZETA2 - rogers_l_reduced(1.0 / x)
    }
}

/// The dilogarithm `Li₂(x)` for real `x <= 1`.
pub fn li2(x: f64) -> Result<f64> {
    if x <= 1.0 {
        Ok(li2_reduced(x))
    } else {
        Err(Error::domain("li2", x, "x <= 1"))
    }
}

/// The extended Rogers L-function `L(x) = Li₂(x) + ½ log|x| log(1 - x)`.
pub fn rogers_l(x: f64) -> Result<f64> {
    RogersArg::new(x).map(RogersArg::rogers_l)
}

/// `lim L(x)` as `x -> -∞`, equal to `-π²/6`.
pub fn rogers_l_infinity() -> f64 {
    -ZETA2
}

/// Riemann zeta at an integer `s >= 2`, by Euler-Maclaurin summation.
pub fn zeta(s: u32) -> Result<f64> {
    if s < 2 {
        return Err(Error::domain("zeta", f64::from(s), "integer s >= 2"));
    }
    const N: u32 = 12;
    let sf = f64::from(s);
    let nf = f64::from(N);
    let mut sum: f64 = (1..N).rev().map(|n| f64::from(n).powf(-sf)).sum();
    sum += nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    // Running factor s(s+1)...(s+2m-2) / (2m)! * N^(-s-2m+1).
    let mut factor = sf * nf.powf(-sf - 1.0) / 2.0;
    for (m, b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = m as f64 + 1.0;
        if m > 1.0 {
            let (p, q) = (2.0 * m - 3.0, 2.0 * m - 2.0);
            factor *= (sf + p) * (sf + q) / ((2.0 * m - 1.0) * (2.0 * m) * nf * nf);
        }
        let term = b * factor;
        sum += term;
        if term.abs() < 1e-18 * sum {
            break;
        }
    }
    Ok(sum)
}

/// `ζ(s)` at an integer `s <= 0` (trivial zeros included).
fn zeta_nonpositive(m: u32) -> f64 {
    match m {
        0 => -0.5,
        m if m % 2 == 0 => 0.0,
        m => {
            let idx = (m as usize).div_ceil(2) - 1;
            BERNOULLI_EVEN.get(idx).map_or(0.0, |b| -b / f64::from(m + 1))
        }
    }
}

/// `Li_k(e^μ)` for `k >= 3` and `-ln 2 <= μ < 0` via the expansion in powers
/// of `μ` around the singular point.
fn polylog_log_expansion(k: u32, mu: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut pow = 1.0; // μ^j / j!
    for j in 0..(k + 2 * BERNOULLI_EVEN.len() as u32) {
        if j > 0 {
            pow *= mu / f64::from(j);
        }
        let coeff = if j + 1 == k {
            let harmonic: f64 = (1..k).map(|i| 1.0 / f64::from(i)).sum();
            harmonic - (-mu).ln()
        } else if j + 1 < k {
            zeta(k - j)?
        } else {
            zeta_nonpositive(j - k)
        };
        sum += coeff * pow;
    }
    Ok(sum)
}

/// The polylogarithm `Li_k(x) = Σ_{n>=1} x^n / n^k` for real `x` in
/// `[-1, 1]` where the series converges.
///
/// `k = 0` follows the series convention `x / (1 - x)`, without the `n = 0`
/// term.
pub fn polylog(k: u32, x: f64) -> Result<f64> {
    let in_range = match k {
        0 => x > -1.0 && x < 1.0,
        1 => (-1.0..1.0).contains(&x),
        _ => (-1.0..=1.0).contains(&x),
    };
    if !in_range {
        return Err(Error::domain(
            "polylog",
            x,
            "|x| < 1, x = 1 needs k >= 2, x = -1 needs k >= 1",
        ));
    }
    match k {
        0 => Ok(x / (1.0 - x)),
        1 => Ok(-(-x).ln_1p()),
        2 => Ok(li2_reduced(x)),
        _ if x == 1.0 => zeta(k),
        _ if x.abs() <= 0.5 => Ok(power_series(k, x)),
        _ if x > 0.5 => polylog_log_expansion(k, x.ln()),
        _ => {
            // Li_k(x) + Li_k(-x) = 2^(1-k) Li_k(x²)
            let sq = polylog(k, x * x)?;
            let neg = polylog(k, -x)?;
            Ok(2f64.powi(1 - k as i32) * sq - neg)
        }
    }
}
