use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::star::{moyal_bracket, poisson_bracket, star_action, star_apply, Side};
use super::{c64, p_var, x_var, Poly, Symbol, CI, NVARS};
use crate::error::{Error, Result};
use crate::minkowski::{FourVector, MinkowskiMetric};
use crate::operators::{expm_dense, ExpmOptions};

/// Relative size of the last series term accepted as converged.
const SERIES_TOL: f64 = 1e-14;
const SERIES_MAX_TERMS: usize = 80;

fn minkowski_linear(v: FourVector, slot: fn(usize) -> usize) -> Poly {
    // Σ_μ η_{μμ} v^μ z_slot(μ)
    let mut coeffs = [c64(0.0); NVARS];
    for mu in 0..4 {
        coeffs[slot(mu)] = c64(MinkowskiMetric::sign(mu) * v[mu]);
    }
    Poly::linear(&coeffs, c64(0.0))
}

fn check_label(v: FourVector, what: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Star-exponential translations: V⋆(p′) followed by V⋆(−x′), i.e.
/// φ(p + p′/2, x + x′/2)·e^{ix′·(p + p′/2)/2}·e^{−ip′·x/2}.
pub fn translation_flow(phi: &Symbol, p_shift: FourVector, x_shift: FourVector) -> Result<Symbol> {
    check_label(p_shift, "momentum shift")?;
    check_label(x_shift, "position shift")?;
    let mut shift = [c64(0.0); NVARS];
    for mu in 0..4 {
        shift[p_var(mu)] = c64(p_shift[mu] / 2.0);
        shift[x_var(mu)] = c64(x_shift[mu] / 2.0);
    }
    let phase = minkowski_linear(x_shift, p_var)
        .add(&Poly::constant(c64(x_shift.dot(p_shift) / 2.0)))
        .sub(&minkowski_linear(p_shift, x_var))
        .scale(CI * 0.5);
    Ok(phi.shift(&shift).mul(&Symbol::exp_of(&phase)?))
}

/// V^L(p_A, x_A)φ = φ(p − p_A, x − x_A)·e^{i(x·p_A − p·x_A)}.
pub fn vl_shift(phi: &Symbol, p_a: FourVector, x_a: FourVector) -> Result<Symbol> {
    let shifted = translation_flow(phi, p_a * -2.0, x_a * -2.0)?;
    Ok(shifted.scale(Complex64::from_polar(1.0, -x_a.dot(p_a))))
}

/// Affine vector field z ↦ {z_i, G}_P as a 9×9 augmented matrix.
fn hamiltonian_matrix(g: &Symbol) -> Option<DMatrix<Complex64>> {
    let mut m = DMatrix::<Complex64>::zeros(NVARS + 1, NVARS + 1);
    for i in 0..NVARS {
        let v = poisson_bracket(&Symbol::var(i), g).as_polynomial()?;
        if v.degree() > 1 {
            return None;
        }
        for (mono, c) in v.terms() {
            match mono.iter().position(|&e| e == 1) {
                Some(j) => m[(i, j)] = *c,
                None => m[(i, NVARS)] = *c,
            }
        }
    }
    Some(m)
}

/// exp(sA), exactly as a finite sum when A is nilpotent.
fn flow_matrix(a: &DMatrix<Complex64>, s: f64) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let sa = a * c64(s);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    for k in 1..=n {
        term = &term * &sa / c64(k as f64);
        if term.iter().all(|v| *v == c64(0.0)) {
            return Ok(sum);
        }
        sum += &term;
    }
    expm_dense(&sa, ExpmOptions::default())
}

/// Heisenberg evolution dα/ds = {α, G}⋆.
///
/// For deg G ≤ 2 the bracket is a linear vector field and α(s) = α∘Φ_s in
/// closed form, with Φ_s the affine flow it generates. Higher-degree G is
/// summed as a Taylor series of at most `steps` terms.
pub fn heisenberg_flow(alpha: &Symbol, g: &Symbol, s: f64, steps: usize) -> Result<Symbol> {
    let gp = g.as_polynomial().ok_or(Error::NonPolynomialGenerator)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("flow parameter"));
    }
    if s == 0.0 {
        return Ok(alpha.clone());
    }
    if gp.degree() <= 2 {
        let a = hamiltonian_matrix(g).expect("quadratic generator gives affine field");
        let phi = flow_matrix(&a, s)?;
        let mut m = [[c64(0.0); NVARS]; NVARS];
        let mut shift = [c64(0.0); NVARS];
        for i in 0..NVARS {
            for j in 0..NVARS {
                m[i][j] = phi[(i, j)];
            }
            shift[i] = phi[(i, NVARS)];
        }
        return Ok(alpha.substitute_affine(&m, &shift));
    }
    let mut sum = alpha.clone();
    let mut term = alpha.clone();
    for k in 1..=steps {
        term = moyal_bracket(&term, g)?.scale(c64(s / k as f64));
        sum = sum.add(&term);
        if term.is_zero() {
            return Ok(sum);
        }
    }
    let residual = term.max_abs_coeff();
    if residual <= SERIES_TOL * sum.max_abs_coeff().max(1.0) {
        Ok(sum)
    } else {
        Err(Error::SeriesNotConverged { residual, terms: steps })
    }
}

/// Schrödinger evolution dφ/ds = (1/2i) G⋆φ.
///
/// Closed forms are used when G is affine or when φ is an exact
/// eigen-symbol of G⋆; otherwise the exponential series is summed and an
/// error is returned if it fails to converge.
pub fn schrodinger_flow(phi: &Symbol, g: &Symbol, s: f64) -> Result<Symbol> {
    let gp = g.as_polynomial().ok_or(Error::NonPolynomialGenerator)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("flow parameter"));
    }
    if s == 0.0 {
        return Ok(phi.clone());
    }
    let t = Complex64::new(0.0, -s / 2.0);
    let op = star_action(g, Side::Left, 1.0)?;
    if gp.degree() <= 1 {
        // G⋆ = M + D with M multiplicative and D = d·∂ constant, so
        // e^{t(M+D)} = e^{tM} e^{tD} e^{t²D(G)/2}.
        let mut shift = [c64(0.0); NVARS];
        let mut drift = c64(0.0);
        for (d, a) in op.terms() {
            if let Some(i) = d.iter().position(|&k| k == 1) {
                let c = a.as_polynomial().expect("constant coefficient").constant_term();
                shift[i] = t * c;
                drift += c * gp.derivative(i).constant_term();
            }
        }
        let factor = Symbol::exp_of(&gp.scale(t).add(&Poly::constant(t * t * drift / 2.0)))?;
        return Ok(phi.shift(&shift).mul(&factor));
    }
    let image = op.apply(phi);
    if let Some(lambda) = eigenvalue_of(phi, &image) {
        return Ok(phi.scale((t * lambda).exp()));
    }
    let mut sum = phi.clone();
    let mut term = phi.clone();
    for k in 1..=SERIES_MAX_TERMS {
        term = op.apply(&term).scale(t / k as f64);
        sum = sum.add(&term);
        let residual = term.max_abs_coeff();
        if residual <= SERIES_TOL * sum.max_abs_coeff() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        residual: term.max_abs_coeff(),
        terms: SERIES_MAX_TERMS,
    })
}

/// λ with image = λφ up to the symbol tolerance, if such λ exists.
fn eigenvalue_of(phi: &Symbol, image: &Symbol) -> Option<Complex64> {
    let (e, p) = phi.groups().first()?;
    let (m, c) = p.terms().next()?;
    let hit = image.groups().iter().find(|(f, _)| f.sub(e).max_abs() <= super::EXPONENT_TOL)?;
    let lambda = hit.1.coefficient(m) / c;
    let tol = 1e-12 * phi.max_abs_coeff().max(image.max_abs_coeff());
    image.sub(&phi.scale(lambda)).max_abs_coeff().le(&tol).then_some(lambda)
}

/// e^{i(2k_μ − p_μ)x^μ} for a contravariant k.
pub fn plane_wave(k: FourVector) -> Result<Symbol> {
    check_label(k, "wave vector")?;
    let mut q = Poly::zero();
    for mu in 0..4 {
        let eta = MinkowskiMetric::sign(mu);
        q = q.add(&Poly::var(x_var(mu)).scale(CI * (2.0 * eta * k[mu])));
        q = q.add(&Poly::var(p_var(mu)).mul(&Poly::var(x_var(mu))).scale(-CI * eta));
    }
    Symbol::exp_of(&q)
}

/// p·p/2m.
pub fn free_hamiltonian(mass: f64) -> Symbol {
    (0..4).fold(Symbol::zero(), |acc, mu| {
        acc.add(&Symbol::p_upper(mu).mul(&Symbol::p_lower(mu)))
    })
    .scale(c64(0.5 / mass))
}

#[derive(Clone, Debug, Serialize)]
pub struct KleinGordonReport {
    /// Coefficient λ read off G_τ⋆φ = λφ.
    pub eigenvalue: f64,
    /// 2k·k/m for comparison.
    pub predicted: f64,
    /// Largest coefficient of G_τ⋆φ − λφ.
    pub residual: f64,
    /// (2k)·(2k) + m²; zero on the mass shell.
    pub mass_shell_defect: f64,
}

/// Applies G_τ⋆ to the plane wave of wave vector k and reads off the
/// eigenvalue.
pub fn klein_gordon_check(k: FourVector, mass: f64) -> Result<KleinGordonReport> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let phi = plane_wave(k)?;
    let image = star_apply(&free_hamiltonian(mass), &phi, Side::Left)?;
    let lambda = image
        .groups()
        .iter()
        .find(|(e, _)| *e == phi.groups()[0].0)
        .map(|(_, p)| p.constant_term())
        .unwrap_or_default();
    let residual = image.sub(&phi.scale(c64(lambda.re))).max_abs_coeff();
    let k2 = k * 2.0;
    Ok(KleinGordonReport {
        eigenvalue: lambda.re,
        predicted: 2.0 * k.square() / mass,
        residual,
        mass_shell_defect: k2.square() + mass * mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vac() -> Symbol {
        let mut q = Poly::zero();
        for mu in 0..4 {
            let e = MinkowskiMetric::sign(mu);
            q = q.add(&Poly::var(p_var(mu)).pow(2).scale(c64(-0.5 * e)));
            q = q.add(&Poly::var(x_var(mu)).pow(2).scale(c64(-0.5 * e)));
        }
        Symbol::exp_of(&q).unwrap()
    }

    #[test]
    fn hamilton_equations_exact() {
        let (m, tau) = (3.0, 0.75);
        let g = free_hamiltonian(m);
        for mu in 0..4 {
            let x = heisenberg_flow(&Symbol::x_lower(mu), &g, tau, 0).unwrap();
            assert_eq!(x, Symbol::x_lower(mu).add(&Symbol::p_lower(mu).scale(c64(tau / m))));
            let p = heisenberg_flow(&Symbol::p_lower(mu), &g, tau, 0).unwrap();
            assert_eq!(p, Symbol::p_lower(mu));
        }
        assert_eq!(heisenberg_flow(&vac(), &g, 0.0, 0).unwrap(), vac());
    }

    #[test]
    fn translation_identity_and_example() {
        let phi = vac();
        assert_eq!(translation_flow(&phi, FourVector::ZERO, FourVector::ZERO).unwrap(), phi);
        let xs = FourVector::new(0.5, -0.25, 0.0, 1.0);
        let got = translation_flow(&phi, FourVector::ZERO, xs).unwrap();
        let z = [0.1, 0.2, -0.3, 0.4, 0.7, -0.1, 0.2, 0.05];
        let mut w = z;
        for mu in 0..4 {
            w[x_var(mu)] += xs[mu] / 2.0;
        }
        let p = FourVector::new(z[0], z[1], z[2], z[3]);
        let expect = phi.evaluate_real(&w) * Complex64::from_polar(1.0, xs.dot(p) / 2.0);
        assert!((got.evaluate_real(&z) - expect).norm() < 1e-14);
    }

    #[test]
    fn vl_shift_of_vacuum_is_coherent_wavefunction() {
        use crate::operators::{coherent_overlap, PhasePoint};
        let a = PhasePoint::new(FourVector::new(0.2, -0.1, 0.3, 0.0), FourVector::new(-0.4, 0.25, 0.1, 0.5));
        let phi_a = vl_shift(&vac(), a.p, a.x).unwrap();
        let z = [0.3, -0.2, 0.1, 0.6, -0.5, 0.4, 0.0, 0.2];
        let b = PhasePoint::new(FourVector::new(z[0], z[1], z[2], z[3]), FourVector::new(z[4], z[5], z[6], z[7]));
        assert!((phi_a.evaluate_real(&z) - coherent_overlap(&a, &b)).norm() < 1e-14);
    }

    #[test]
    fn klein_gordon_on_and_off_shell() {
        let m = 2.0;
        // (2k)·(2k) = −6.25 + 2.25 = −m², all values dyadic.
        let k = FourVector::new(1.25, 0.75, 0.0, 0.0);
        let r = klein_gordon_check(k, m).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.eigenvalue, r.predicted);
        assert_eq!(r.mass_shell_defect, 0.0);
        assert_eq!(r.eigenvalue, -m / 2.0);
        let zero = klein_gordon_check(FourVector::ZERO, m).unwrap();
        assert_eq!(zero.eigenvalue, 0.0);
        assert_eq!(zero.residual, 0.0);
        assert!(klein_gordon_check(k, 0.0).is_err());
    }

    #[test]
    fn schrodinger_plane_wave_phase() {
        let m = 2.0;
        let k = FourVector::new(1.25, 0.75, 0.0, 0.0);
        let phi = plane_wave(k).unwrap();
        let tau = 0.3;
        let got = schrodinger_flow(&phi, &free_hamiltonian(m), tau).unwrap();
        let expect = phi.scale((Complex64::new(-m * tau, 0.0) / (4.0 * CI)).exp());
        assert!(got.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn schrodinger_translation_matches_translation_flow() {
        let phi = vac().mul(&Symbol::x_upper(1));
        let s = 0.4;
        let got = schrodinger_flow(&phi, &Symbol::p_lower(1), s).unwrap();
        let expect = translation_flow(&phi, FourVector::ZERO, FourVector::axis(1, -s)).unwrap();
        assert!(got.approx_eq(&expect, 1e-15));
        assert_eq!(schrodinger_flow(&phi, &Symbol::p_lower(1), 0.0).unwrap(), phi);
    }

    #[test]
    fn cubic_generator_uses_series() {
        let g = Symbol::p_upper(1).mul(&Symbol::p_upper(1)).mul(&Symbol::p_upper(1));
        let x = heisenberg_flow(&Symbol::x_upper(1), &g, 0.5, 10).unwrap();
        // ẋ = {x, p³}⋆ = 3p², constant along the flow.
        let expect = Symbol::x_upper(1).add(&Symbol::p_upper(1).mul(&Symbol::p_upper(1)).scale(c64(1.5)));
        assert_eq!(x, expect);
    }
}
