//! The closed-form cusp density `4t²/sinh²t` against the double integral
//! over the cusp chart.
//!
//! With `u = -x > 0` and `v = y - 1 > 0`, a geodesic from `x < 0` to
//! `y > 1` cuts the cusp at ∞ of the triangle `(0, 1, ∞)` in a chord of
//! length `½ ln((1 + 1/u)(1 + 1/v))`, and the measure of chords is
//! `4 len du dv/(u + v + 1)²`. For fixed `u` the length decreases in `v`,
//! so `len >= t` exactly when `v <= 1/(e^{2t}/(1 + 1/u) - 1)`.

use ortholab::density::{cusp_density, cusp_mass};
use ortholab::hypgeom::triangle_length_l2;
use ortholab::quad::{gauss_kronrod, Tolerance};

fn len(u: f64, v: f64) -> f64 {
    0.5 * ((1.0 + 1.0 / u).ln() + (1.0 + 1.0 / v).ln())
}

/// Largest `v` with `len(u, v) >= t`, infinite if every `v` qualifies.
fn v_at(u: f64, t: f64) -> f64 {
    let q = (2.0 * t).exp() / (1.0 + 1.0 / u);
    if q <= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (q - 1.0)
    }
}

fn quad(f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> f64 {
    gauss_kronrod(f, lo, hi, &[], Tolerance::new(1e-300, 1e-11), 5000)
        .unwrap()
        .value
}

/// `∫_lo^∞ h`, mapped to `(0, 1)` by `z = lo + s/(1 - s)`.
fn quad_to_infinity(mut h: impl FnMut(f64) -> f64, lo: f64) -> f64 {
    quad(
        |s| {
            let w = 1.0 - s;
            h(lo + s / w) / (w * w)
        },
        0.0,
        1.0,
    )
}

fn window_mass_2d(t0: f64, t1: f64) -> f64 {
    let inner = |u: f64| {
        let v_hi = v_at(u, t0);
        let v_lo = v_at(u, t1);
        if v_lo.is_infinite() {
            return 0.0;
        }
        let h = |v: f64| 4.0 * len(u, v) / (u + v + 1.0).powi(2);
        if v_hi.is_infinite() {
            quad_to_infinity(h, v_lo)
        } else {
            quad(h, v_lo, v_hi)
        }
    };
    let u_empty = 1.0 / (2.0 * t1).exp_m1();
    let u_bounded = 1.0 / (2.0 * t0).exp_m1();
    quad(inner, u_empty, u_bounded) + quad_to_infinity(inner, u_bounded)
}

fn window_mass_closed(t0: f64, t1: f64) -> f64 {
    quad(|t| cusp_density(1, t).unwrap(), t0, t1)
}

#[test]
fn chart_length_is_the_cusp_chord() {
    for &(u, v) in &[(0.3, 2.0), (5.0, 0.01), (1e-3, 40.0)] {
        let direct = triangle_length_l2(-u, 1.0 + v).unwrap();
        assert!((len(u, v) - direct).abs() < 1e-13 * direct.max(1.0));
    }
}

#[test]
fn windows_match_closed_form() {
    for &(t0, t1) in &[(0.05, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 4.0), (4.0, 8.0)] {
        let a = window_mass_2d(t0, t1);
        let b = window_mass_closed(t0, t1);
        assert!((a - b).abs() <= 1e-8 * b, "[{t0}, {t1}]: 2d {a}, closed {b}");
    }
}

#[test]
fn truncated_total_approaches_cusp_mass() {
    let mass = window_mass_2d(1e-3, 12.0);
    let missing = cusp_mass(1) - mass;
    // Below 1e-3 the density is about 4, above 12 it is below 1e-8.
    assert!(missing > 0.0 && missing < 5e-3, "missing {missing}");
    assert!((missing - 4e-3).abs() < 1e-5, "missing {missing}");
}
