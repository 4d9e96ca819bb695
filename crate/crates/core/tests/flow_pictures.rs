//! Expectation values agree between the Heisenberg and Schrödinger pictures.

use kreinlab::minkowski::FourVector;
use kreinlab::quadrature::{krein_integral_inner, vacuum_wavefunction, QuadratureGrid};
use kreinlab::symbol::{heisenberg_flow, schrodinger_flow, star_apply, vl_shift, Side, Symbol};
use num_complex::Complex64;

fn expectation(alpha: &Symbol, phi: &Symbol, grid: &QuadratureGrid) -> Complex64 {
    let image = star_apply(alpha, phi, Side::Left).unwrap();
    krein_integral_inner(phi, &image, grid).unwrap() / krein_integral_inner(phi, phi, grid).unwrap()
}

fn check(g: &Symbol, s: f64) {
    let grid = QuadratureGrid::new(48).unwrap();
    let phi = vl_shift(
        &vacuum_wavefunction(),
        FourVector::new(0.1, 0.3, -0.2, 0.0),
        FourVector::new(0.2, -0.25, 0.1, 0.3),
    )
    .unwrap();
    let evolved = schrodinger_flow(&phi, g, s).unwrap();
    for alpha in [Symbol::x_lower(0), Symbol::p_lower(0), Symbol::x_lower(1), Symbol::p_lower(1), Symbol::x_lower(2)] {
        let heisenberg = expectation(&heisenberg_flow(&alpha, g, s, 0).unwrap(), &phi, &grid);
        let schrodinger = expectation(&alpha, &evolved, &grid);
        assert!((heisenberg - schrodinger).norm() <= 1e-10, "{alpha}: {heisenberg} vs {schrodinger}");
    }
}

#[test]
fn free_particle_pictures_agree() {
    // p₁p¹/2m with m = 1: not an eigen-symbol, so the series path runs.
    let p1 = Symbol::p_upper(1);
    check(&p1.mul(&p1).scale(Complex64::new(0.5, 0.0)), 0.3);
}

#[test]
fn squeeze_pictures_agree() {
    // Generators that couple two components make the series symbols grow
    // too fast for the quadrature; one component at a time is enough here.
    let (x1, p1) = (Symbol::x_upper(1), Symbol::p_upper(1));
    check(&x1.mul(&p1).add(&x1.mul(&x1)), 0.05);
}

#[test]
fn time_component_pictures_agree() {
    let p0 = Symbol::p_upper(0);
    check(&p0.mul(&Symbol::p_lower(0)).add(&Symbol::x_upper(0)).scale(Complex64::new(0.5, 0.0)), 0.05);
}
