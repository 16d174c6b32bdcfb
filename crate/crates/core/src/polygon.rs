//! Ideal polygons, their orthospectra and the finite dilogarithm identities
//! they satisfy.
//!
//! Side `i` of an ideal `n`-gon joins vertex `i` to vertex `i + 1 (mod n)`.
//! Two sides are disjoint when they do not share a vertex, and each
//! unordered pair of disjoint sides carries one orthogeodesic whose length
//! is read off the cross-ratio of the four endpoints.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dilog::{rogers_l, ZETA2};
use crate::error::{Error, Result};
use crate::hypgeom::ExtReal;
use crate::rng::Stream;

const TAU: f64 = 2.0 * PI;

/// Ideal polygon in the disk model, stored as strictly increasing vertex
/// angles in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealPolygon {
    angles: Vec<f64>,
}

impl IdealPolygon {
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                angles.len()
            )));
        }
        if let Some(&bad) = angles.iter().find(|&&t| !(0.0..TAU).contains(&t)) {
            return Err(Error::InvalidPolygon(format!("angle {bad} outside [0, 2π)")));
        }
        if let Some(w) = angles.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPolygon(format!(
                "angles not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(IdealPolygon { angles })
    }

    /// Polygon from boundary points of the upper half-plane in cyclic
    /// (counterclockwise) order, e.g. `0, 0.25, 0.5, 1, ∞`.
    ///
    /// Points are carried to the circle by the Cayley map; the vertex list
    /// is rotated to start at the smallest angle, so vertex `k` of the
    /// result is input point `(k + shift) mod n`.
    pub fn from_points(points: &[ExtReal]) -> Result<Self> {
        let angles: Vec<f64> = points.iter().map(|p| p.to_angle()).collect();
        let start = angles
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut rotated = angles[start..].to_vec();
        rotated.extend_from_slice(&angles[..start]);
        Self::from_angles(rotated).map_err(|e| match e {
            Error::InvalidPolygon(msg) => {
                Error::InvalidPolygon(format!("points not in cyclic order or coincident ({msg})"))
            }
            other => other,
        })
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.angles[k % self.n()]
    }

    pub fn point(&self, k: usize) -> ExtReal {
        ExtReal::from_angle(self.angle(k))
    }

    pub fn area(&self) -> f64 {
        (self.n() as f64 - 2.0) * PI
    }

    /// `|χ|` of the polygon viewed as a surface with geodesic boundary.
    pub fn euler_characteristic_abs(&self) -> f64 {
        (self.n() as f64 - 2.0) / 2.0
    }

    /// Each ideal vertex is a cusp of the complement of the boundary.
    pub fn cusp_count(&self) -> usize {
        self.n()
    }

    /// Unordered pairs of disjoint sides, sorted lexicographically.
    pub fn disjoint_side_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(3) / 2);
        for i in 0..n {
            for j in (i + 2)..n {
                if !(i == 0 && j == n - 1) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn vertices_deg(&self) -> Vec<f64> {
        self.angles.iter().map(|t| t.to_degrees()).collect()
    }
}

/// The orthogeodesic between sides `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthoGeodesic {
    pub i: usize,
    pub j: usize,
    /// `[x_i, x_{i+1}, x_j, x_{j+1}] = 1/cosh²(l/2)`.
    pub b: f64,
    /// `1 - b`, computed as a cross-ratio of its own so it keeps full
    /// relative precision when `b` is close to 1.
    pub one_minus_b: f64,
    pub l: f64,
    /// `-b/(1 - b) = -1/sinh²(l/2)`.
    pub a: f64,
}

impl OrthoGeodesic {
    fn from_cross_ratios(i: usize, j: usize, b: f64, one_minus_b: f64) -> Self {
        OrthoGeodesic {
            i,
            j,
            b,
            one_minus_b,
            l: 2.0 * (one_minus_b / b).sqrt().asinh(),
            a: -b / one_minus_b,
        }
    }

    /// `L(b)`, through reflection when `b > ½`.
    pub fn rogers_l(&self) -> f64 {
        if self.b <= 0.5 {
            rogers_l(self.b).expect("b lies in (0, 1)")
        } else {
            ZETA2 - rogers_l(self.one_minus_b).expect("1 - b lies in (0, 1)")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoSpectrum {
    pub n: usize,
    pub entries: Vec<OrthoGeodesic>,
}

impl OrthoSpectrum {
    pub fn lengths(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.l).collect()
    }

    /// `Σ L(b)` over the entries.
    pub fn rogers_sum(&self) -> f64 {
        self.entries.iter().map(OrthoGeodesic::rogers_l).sum()
    }

    /// Cross-ratios `b`, sorted.
    pub fn sorted_b(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.entries.iter().map(|e| e.b).collect();
        b.sort_by(f64::total_cmp);
        b
    }
}

/// `sin((u - v)/2)`; the Cayley phases cancel in every cross-ratio, so
/// these signed chords are all that is needed.
fn half_sine(u: f64, v: f64) -> f64 {
    ((u - v) / 2.0).sin()
}

pub fn orthospectrum(p: &IdealPolygon) -> OrthoSpectrum {
    let entries = p
        .disjoint_side_pairs()
        .into_iter()
        .map(|(i, j)| {
            let (ti, ti1, tj, tj1) = (p.angle(i), p.angle(i + 1), p.angle(j), p.angle(j + 1));
            let den = half_sine(ti, tj) * half_sine(tj1, ti1);
            let b = half_sine(ti, ti1) * half_sine(tj1, tj) / den;
            let one_minus_b = half_sine(ti, tj1) * half_sine(tj, ti1) / den;
            OrthoGeodesic::from_cross_ratios(i, j, b, one_minus_b)
        })
        .collect();
    OrthoSpectrum { n: p.n(), entries }
}

/// `Σ L(b_ij) - (n - 3)π²/6` over unordered pairs of disjoint sides.
pub fn identity_defect(p: &IdealPolygon) -> f64 {
    orthospectrum(p).rogers_sum() - (p.n() as f64 - 3.0) * ZETA2
}

/// Cross-ratios of the pentagon with vertices `0, u, v, 1, ∞`.
pub fn pentagon_cross_ratios(u: f64, v: f64) -> Result<[f64; 5]> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain("pentagon_cross_ratios", u, "0 < u < v < 1"));
    }
    if !(v > u && v < 1.0) {
        return Err(Error::domain("pentagon_cross_ratios", v, "0 < u < v < 1"));
    }
    Ok([
        u,
        1.0 - v,
        (v - u) / v,
        (v - u) / (1.0 - u),
        u * (1.0 - v) / (v * (1.0 - u)),
    ])
}

/// Vertices at the `n`-th roots of unity.
pub fn regular_polygon(n: usize) -> Result<IdealPolygon> {
    if n < 3 {
        return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {n}")));
    }
    IdealPolygon::from_angles((0..n).map(|k| TAU * k as f64 / n as f64).collect())
}

/// Orthospectrum of the regular `n`-gon in closed form: sides `d` apart
/// (cyclically) have `b = sin²(π/n)/sin²(dπ/n)`.
pub fn regular_spectrum(n: usize) -> Result<OrthoSpectrum> {
    let p = regular_polygon(n)?;
    let step = PI / n as f64;
    let entries = p
        .disjoint_side_pairs()
        .into_iter()
        .map(|(i, j)| {
            let d = (j - i).min(n - (j - i)) as f64;
            let s1 = step.sin();
            let sd = (d * step).sin();
            // sin²(dθ) - sin²(θ) = sin((d - 1)θ) sin((d + 1)θ).
            let b = (s1 / sd).powi(2);
            let one_minus_b = ((d - 1.0) * step).sin() * ((d + 1.0) * step).sin() / (sd * sd);
            OrthoGeodesic::from_cross_ratios(i, j, b, one_minus_b)
        })
        .collect();
    Ok(OrthoSpectrum { n, entries })
}

/// `Σ_{r=2}^{R} L(1/r²)`, summed from the smallest term up.
pub fn lewin_partial_sum(r_max: u64) -> Result<f64> {
    if r_max < 2 {
        return Err(Error::domain("lewin_partial_sum", r_max as f64, "R >= 2"));
    }
    Ok((2..=r_max)
        .rev()
        .map(|r| {
            let r = r as f64;
            rogers_l(1.0 / (r * r)).expect("1/r² lies in (0, 1)")
        })
        .sum())
}

/// Leading-order size of the omitted tail `Σ_{r>R} L(1/r²) ≈ (2 + ln R)/R`,
/// from `L(x) ≈ x - ½ x ln x` for small `x`.
pub fn lewin_tail_estimate(r_max: u64) -> f64 {
    let r = r_max as f64;
    (2.0 + r.ln()) / r
}

/// Residual of the length-spectrum identity for a surface of the given
/// area with `cusps` cusps and a finite orthospectrum:
/// `Σ L(1/cosh²(l/2)) - π²(6|χ| - N)/12` with `2π|χ| = area`.
///
/// The equivalent form `Σ L(-1/sinh²(l/2)) = -π²(6|χ| - N)/12` is evaluated
/// as well and the two residuals must agree to 1e-10.
pub fn general_identity_residual(area: f64, cusps: usize, lengths: &[f64]) -> Result<f64> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::domain("general_identity_residual", area, "area > 0"));
    }
    let chi = area / TAU;
    let rhs = PI * PI * (6.0 * chi - cusps as f64) / 12.0;
    let mut cosh_sum = 0.0;
    let mut sinh_sum = 0.0;
    for &l in lengths {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::domain("general_identity_residual", l, "l > 0"));
        }
        let c = (l / 2.0).cosh();
        let t = (l / 2.0).tanh();
        let s = (l / 2.0).sinh();
        let b = 1.0 / (c * c);
        cosh_sum += if b <= 0.5 {
            rogers_l(b)?
        } else {
            ZETA2 - rogers_l(t * t)?
        };
        sinh_sum += rogers_l(-1.0 / (s * s))?;
    }
    let residual = cosh_sum - rhs;
    let sinh_residual = -sinh_sum - rhs;
    let diff = (residual - sinh_residual).abs();
    if diff > 1e-10 {
        return Err(Error::Inconsistent {
            what: "cosh and sinh forms of the spectrum identity",
            diff,
        });
    }
    Ok(residual)
}

/// `n` uniform angles, sorted, redrawn until every cyclic gap is at least
/// `min_gap`.
pub fn random_polygon(n: usize, min_gap: f64, rng: &mut Stream) -> Result<IdealPolygon> {
    if n < 3 {
        return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {n}")));
    }
    if !(min_gap >= 0.0 && min_gap * n as f64 <= TAU / 2.0) {
        return Err(Error::domain("random_polygon", min_gap, "0 <= min_gap <= π/n"));
    }
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| TAU * rng.uniform()).collect();
        angles.sort_by(f64::total_cmp);
        let wrap = angles[0] + TAU - angles[n - 1];
        if wrap >= min_gap && angles.windows(2).all(|w| w[1] - w[0] >= min_gap) {
            return IdealPolygon::from_angles(angles);
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthoEntry {
    pub i: usize,
    pub j: usize,
    pub b: f64,
    pub l: f64,
}

/// Polygon, orthospectrum and identity defect in exchange form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonReport {
    pub n: usize,
    pub vertices_deg: Vec<f64>,
    pub ortho: Vec<OrthoEntry>,
    pub defect: f64,
}

impl PolygonReport {
    pub fn new(p: &IdealPolygon) -> Self {
        let spectrum = orthospectrum(p);
        PolygonReport {
            n: p.n(),
            vertices_deg: p.vertices_deg(),
            ortho: spectrum
                .entries
                .iter()
                .map(|e| OrthoEntry {
                    i: e.i,
                    j: e.j,
                    b: e.b,
                    l: e.l,
                })
                .collect(),
            defect: spectrum.rogers_sum() - (p.n() as f64 - 3.0) * ZETA2,
        }
    }
}
