//! Every acceptance criterion at its stated tolerance, one test each. Each
//! test prints a PASS or FAIL line followed by its measured errors.

use ortholab::config::Tolerances;
use ortholab::rng::DEFAULT_SEED;
use ortholab::verify::run_criterion;

fn check(id: u32) {
    let result = run_criterion(id, DEFAULT_SEED, &Tolerances::default());
    println!("{result}");
    assert!(result.passed(), "{result}");
}

#[test]
fn criterion_01_special_values() {
    check(1);
}

#[test]
fn criterion_02_functional_equations() {
    check(2);
}

#[test]
fn criterion_03_polygon_identity() {
    check(3);
}

#[test]
fn criterion_04_hexagon_and_reciprocity() {
    check(4);
}

#[test]
fn criterion_05_lewin_series() {
    check(5);
}

#[test]
fn criterion_06_integral_oracle() {
    check(6);
}

#[test]
fn criterion_07_antiderivative() {
    check(7);
}

#[test]
fn criterion_08_mass_closure() {
    check(8);
}

#[test]
fn criterion_09_asymptotics() {
    check(9);
}

#[test]
fn criterion_10_monte_carlo_masses() {
    check(10);
}

#[test]
fn criterion_11_monte_carlo_shape() {
    check(11);
}
