//! Contraction limits evaluated at finite parameters: Lorentz to Galilean
//! as c grows, and quantum to classical as the phase-space scales k_x, k_p
//! grow. Every claim is exposed as a fitted convergence rate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;
use crate::minkowski::FourVector;
use crate::operators::{coherent_overlap, PhasePoint};
use crate::quadrature::{fock_wavefunction, krein_integral_inner, QuadratureGrid};
use crate::symbol::{
    free_hamiltonian, moyal_bracket, p_var, poisson_bracket, scaled_moyal_bracket, star_action, tilde, x_var,
    DiffOp, GeneratorId, Side, Symbol,
};

/// In the Galilean frame slot p⁰ holds e and slot x⁰ holds t.
pub const E_SLOT: usize = p_var(0);
pub const T_SLOT: usize = x_var(0);

const I: Complex64 = Complex64::new(0.0, 1.0);

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContractionParams {
    /// Speed-of-light scale.
    pub c: f64,
    /// Finite label with ς = c²χ.
    pub chi: f64,
    pub kx: f64,
    pub kp: f64,
}

impl ContractionParams {
    pub fn new(c: f64, chi: f64, kx: f64, kp: f64) -> Result<Self> {
        positive(c, "c")?;
        positive(chi, "chi")?;
        positive(kx, "k_x")?;
        positive(kp, "k_p")?;
        Ok(ContractionParams { c, chi, kx, kp })
    }

    pub fn sigma(&self) -> f64 {
        self.c * self.c * self.chi
    }

    /// Deformation parameter 1/(k_x k_p) of the rescaled star product.
    pub fn kappa(&self) -> f64 {
        1.0 / (self.kx * self.kp)
    }
}

/// Labels (p^i, x^i, t, e) with x⁰ = c t and p⁰ = e/c.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GalileanLabels {
    pub p: [f64; 3],
    pub x: [f64; 3],
    pub t: f64,
    pub e: f64,
}

impl GalileanLabels {
    pub fn phase_point(&self, c: f64) -> PhasePoint {
        PhasePoint::new(
            FourVector::new(self.e / c, self.p[0], self.p[1], self.p[2]),
            FourVector::new(c * self.t, self.x[0], self.x[1], self.x[2]),
        )
    }

    pub fn from_phase_point(a: &PhasePoint, c: f64) -> Self {
        GalileanLabels {
            p: [a.p[1], a.p[2], a.p[3]],
            x: [a.x[1], a.x[2], a.x[3]],
            t: a.x[0] / c,
            e: a.p[0] * c,
        }
    }
}

/// Least-squares slope of y against x.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("slope fit needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 || !sxy.is_finite() {
        return Err(Error::InvalidParameter("degenerate abscissae in slope fit".into()));
    }
    Ok(sxy / sxx)
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_slope(&lx, &ly)
}

#[derive(Clone, Debug, Serialize)]
pub struct GalileanOverlapRow {
    pub c: f64,
    /// ln|⟨B|A⟩| from the coherent-state overlap.
    pub log_magnitude: f64,
    /// e^{Δe²/(2c²)}.
    pub e_factor: f64,
    /// e^{c²Δt²/2}.
    pub t_factor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GalileanOverlapScan {
    pub rows: Vec<GalileanOverlapRow>,
    /// Slope of ln(e_factor − 1) against ln c; tends to −2.
    pub e_factor_exponent: Option<f64>,
    /// Slope of the log-magnitude against c²; equals Δt²/2.
    pub log_magnitude_slope_c2: Option<f64>,
}

/// Overlap magnitudes of two Galilean-labelled states for each c.
pub fn galilean_overlap_scan(a: &GalileanLabels, b: &GalileanLabels, c_values: &[f64]) -> Result<GalileanOverlapScan> {
    let de = b.e - a.e;
    let dt = b.t - a.t;
    let mut rows = Vec::with_capacity(c_values.len());
    for &c in c_values {
        positive(c, "c")?;
        let overlap = coherent_overlap(&a.phase_point(c), &b.phase_point(c));
        rows.push(GalileanOverlapRow {
            c,
            log_magnitude: overlap.norm().ln(),
            e_factor: (de * de / (2.0 * c * c)).exp(),
            t_factor: (c * c * dt * dt / 2.0).exp(),
        });
    }
    let cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    let e_excess: Vec<f64> = c_values.iter().map(|c| (de * de / (2.0 * c * c)).exp_m1()).collect();
    let e_factor_exponent = if de != 0.0 { log_log_slope(&cs, &e_excess).ok() } else { None };
    let c2: Vec<f64> = cs.iter().map(|c| c * c).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.log_magnitude).collect();
    Ok(GalileanOverlapScan {
        rows,
        e_factor_exponent,
        log_magnitude_slope_c2: fit_slope(&c2, &logs).ok(),
    })
}

/// Rewrites an action in (t, e) variables: x⁰ = c t, p⁰ = e/c.
pub fn to_galilean_variables(op: &DiffOp, c: f64) -> Result<DiffOp> {
    let mut f = [1.0; 8];
    f[E_SLOT] = 1.0 / c;
    f[T_SLOT] = c;
    op.scale_variables(&f)
}

/// G_{ω^{i0}} = x_i p_0 − x_0 p_i.
fn omega_i0(i: usize) -> Symbol {
    GeneratorId::Omega(0, i).symbol().scale(Complex64::new(-1.0, 0.0))
}

/// The Galilean boost G_{β^i}⋆ = (1/c) G_{ω^{i0}}⋆ in (t, e) variables.
pub fn galilean_boost_action(i: usize, c: f64) -> Result<DiffOp> {
    check_spatial(i)?;
    positive(c, "c")?;
    let op = star_action(&omega_i0(i), Side::Left, 1.0)?;
    Ok(to_galilean_variables(&op, c)?.scale(Complex64::new(1.0 / c, 0.0)))
}

/// G̃_{β^i} = (1/c) G̃_{ω^{i0}} in (t, e) variables.
pub fn galilean_boost_tilde(i: usize, c: f64) -> Result<DiffOp> {
    check_spatial(i)?;
    positive(c, "c")?;
    Ok(to_galilean_variables(&tilde(&omega_i0(i))?, c)?.scale(Complex64::new(1.0 / c, 0.0)))
}

/// The c → ∞ limit (t − i∂_e)∘(p_i − i∂_{x^i}) of the boost action.
pub fn contracted_boost_action(i: usize) -> Result<DiffOp> {
    check_spatial(i)?;
    let lt = DiffOp::multiplication(Symbol::var(T_SLOT)).add(&DiffOp::partial(E_SLOT, -I));
    Ok(lt.compose(&star_action(&Symbol::p_lower(i), Side::Left, 1.0)?))
}

/// The limit −2i(t∂_{x^i} + p_i∂_e) of G̃_{β^i}.
pub fn contracted_boost_tilde(i: usize) -> Result<DiffOp> {
    check_spatial(i)?;
    let a = DiffOp::partial(x_var(i), Complex64::new(1.0, 0.0)).premultiply(&Symbol::var(T_SLOT));
    let b = DiffOp::partial(E_SLOT, Complex64::new(1.0, 0.0)).premultiply(&Symbol::p_lower(i));
    Ok(a.add(&b).scale(-2.0 * I))
}

fn check_spatial(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidAxis(i))
    }
}

/// Polynomial in (t, e, p^i, x^i) used to probe action residuals.
pub fn galilean_test_symbol() -> Symbol {
    let t = Symbol::var(T_SLOT);
    let e = Symbol::var(E_SLOT);
    t.mul(&e)
        .add(&Symbol::x_upper(1).mul(&Symbol::p_upper(1)))
        .add(&e.mul(&e).mul(&t))
        .add(&Symbol::x_upper(2).mul(&t).scale(Complex64::new(0.5, 0.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorLimitReport {
    pub c: f64,
    pub axis: usize,
    /// Largest coefficient of (G_β⋆ − limit) applied to the test symbol.
    pub boost_residual: f64,
    /// Largest coefficient of G̃_β − limit as an operator.
    pub tilde_residual: f64,
    /// [G_β, G̃_{p^j}] + 2iδ_ij G_{−e} in the contracted algebra, max over j.
    pub commutator_residual: f64,
    /// {x_i, G_t}⋆ − p_i/m and {p_i, G_t}⋆ for G_t = p_ip^i/2m (m = 1).
    pub hamilton_residual: f64,
}

/// Compares the finite-c boost generators against their Galilean limits.
pub fn galilean_generator_limit(c: f64, axis: usize) -> Result<GeneratorLimitReport> {
    let probe = galilean_test_symbol();
    let boost = galilean_boost_action(axis, c)?;
    let limit = contracted_boost_action(axis)?;
    let boost_residual = boost.apply(&probe).sub(&limit.apply(&probe)).max_abs_coeff();
    let tilde_residual = galilean_boost_tilde(axis, c)?.sub(&contracted_boost_tilde(axis)?).max_abs_coeff();

    // Contracted multiplicative boost t·p_i against G̃_{p^j} = 2i∂_{p^j}.
    let g_beta = DiffOp::multiplication(Symbol::var(T_SLOT).mul(&Symbol::p_lower(axis)));
    let g_minus_e = DiffOp::multiplication(Symbol::var(T_SLOT));
    let mut commutator_residual = 0.0f64;
    for j in 1..=3 {
        let comm = g_beta.commutator(&tilde(&Symbol::x_lower(j))?);
        let delta = if j == axis { 1.0 } else { 0.0 };
        let expect = g_minus_e.scale(-2.0 * I * delta);
        commutator_residual = commutator_residual.max(comm.sub(&expect).max_abs_coeff());
    }

    let g_t = (1..=3).fold(Symbol::zero(), |acc, k| acc.add(&Symbol::p_upper(k).mul(&Symbol::p_lower(k))));
    let g_t = g_t.scale(Complex64::new(0.5, 0.0));
    let mut hamilton_residual = 0.0f64;
    for k in 1..=3 {
        let xdot = moyal_bracket(&Symbol::x_lower(k), &g_t)?.sub(&Symbol::p_lower(k));
        let pdot = moyal_bracket(&Symbol::p_lower(k), &g_t)?;
        hamilton_residual = hamilton_residual.max(xdot.max_abs_coeff()).max(pdot.max_abs_coeff());
    }
    Ok(GeneratorLimitReport {
        c,
        axis,
        boost_residual,
        tilde_residual,
        commutator_residual,
        hamilton_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalRow {
    pub kx: f64,
    pub kp: f64,
    /// ‖α⋆β − αβ‖.
    pub star_deviation: f64,
    /// ‖{α,β}⋆ − {α,β}_Poisson‖.
    pub bracket_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalScan {
    pub rows: Vec<ClassicalRow>,
    /// Log-log slope of star_deviation against k_x k_p.
    pub star_slope: Option<f64>,
    /// Log-log slope of bracket_deviation against k_x k_p.
    pub bracket_slope: Option<f64>,
}

/// Star products of α, β in the rescaled variables, where each derivative
/// pair carries 1/(k_x k_p).
pub fn classical_limit_scan(alpha: &Symbol, beta: &Symbol, k_values: &[(f64, f64)]) -> Result<ClassicalScan> {
    if !alpha.is_polynomial() || !beta.is_polynomial() {
        return Err(Error::NonPolynomialGenerator);
    }
    let pointwise = alpha.mul(beta);
    let poisson = poisson_bracket(alpha, beta);
    let mut rows = Vec::with_capacity(k_values.len());
    for &(kx, kp) in k_values {
        positive(kx, "k_x")?;
        positive(kp, "k_p")?;
        let kappa = 1.0 / (kx * kp);
        let star = star_action(alpha, Side::Left, kappa)?.apply(beta);
        let bracket = scaled_moyal_bracket(alpha, beta, kappa)?;
        rows.push(ClassicalRow {
            kx,
            kp,
            star_deviation: star.sub(&pointwise).max_abs_coeff(),
            bracket_deviation: bracket.sub(&poisson).max_abs_coeff(),
        });
    }
    let k: Vec<f64> = rows.iter().map(|r| r.kx * r.kp).collect();
    let slope = |f: fn(&ClassicalRow) -> f64| {
        let ys: Vec<f64> = rows.iter().map(f).collect();
        if ys.iter().all(|&y| y > 0.0) {
            log_log_slope(&k, &ys).ok()
        } else {
            None
        }
    };
    let star_slope = slope(|r| r.star_deviation);
    let bracket_slope = slope(|r| r.bracket_deviation);
    Ok(ClassicalScan {
        rows,
        star_slope,
        bracket_slope,
    })
}

/// Largest deviation of the classical Hamilton equations
/// {x_μ, G_τ} = p_μ/m, {p_μ, G_τ} = 0 in the contracted variables, for
/// both the Poisson bracket and the rescaled Moyal bracket at `kappa`.
pub fn classical_hamilton_residual(mass: f64, kappa: f64) -> Result<f64> {
    positive(mass, "mass")?;
    let g = free_hamiltonian(mass);
    let mut worst = 0.0f64;
    for mu in 0..4 {
        let target = Symbol::p_lower(mu).scale(Complex64::new(1.0 / mass, 0.0));
        for bracket in [
            poisson_bracket(&Symbol::x_lower(mu), &g),
            scaled_moyal_bracket(&Symbol::x_lower(mu), &g, kappa)?,
        ] {
            worst = worst.max(bracket.sub(&target).max_abs_coeff());
        }
        worst = worst
            .max(poisson_bracket(&Symbol::p_lower(mu), &g).max_abs_coeff())
            .max(scaled_moyal_bracket(&Symbol::p_lower(mu), &g, kappa)?.max_abs_coeff());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationRow {
    pub kx: f64,
    pub kp: f64,
    pub magnitude: f64,
    pub log_magnitude: f64,
    /// Set when the Minkowski separation makes the Gaussian factor grow.
    pub growing: bool,
}

/// |⟨B|A⟩| with labels rescaled to (k_p p^c, k_x x^c).
pub fn coherent_separation_scan(a: &PhasePoint, b: &PhasePoint, k_values: &[(f64, f64)]) -> Result<Vec<SeparationRow>> {
    let mut rows = Vec::with_capacity(k_values.len());
    for &(kx, kp) in k_values {
        positive(kx, "k_x")?;
        positive(kp, "k_p")?;
        let scale = |q: &PhasePoint| PhasePoint::new(q.p * kp, q.x * kx);
        let (sa, sb) = (scale(a), scale(b));
        let overlap = coherent_overlap(&sa, &sb);
        let gauss = (sb.x - sa.x).square() + (sb.p - sa.p).square();
        rows.push(SeparationRow {
            kx,
            kp,
            magnitude: overlap.norm(),
            log_magnitude: overlap.norm().ln(),
            growing: gauss < 0.0,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub states: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub positive_definite: bool,
}

/// Gram matrix of the Fock wavefunctions with n₀ = 0 and spatial total
/// ≤ `n_max` under the integral inner product. These are the states that
/// survive the Galilean contraction; the matrix must be positive definite.
pub fn contracted_gram(n_max: usize, grid: &QuadratureGrid) -> Result<GramReport> {
    let states: Vec<_> = TruncatedBasis::new(n_max)
        .indices()
        .iter()
        .filter(|n| n.0[0] == 0)
        .copied()
        .collect();
    let phis: Vec<Symbol> = states.iter().map(|n| fock_wavefunction(*n)).collect();
    let k = phis.len();
    let mut gram = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = krein_integral_inner(&phis[i], &phis[j], grid)?;
        }
    }
    let hermitian = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen().eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GramReport {
        states: k,
        min_eigenvalue: min,
        max_eigenvalue: max,
        positive_definite: min > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        assert!((fit_slope(&[1.0, 2.0, 3.0], &[2.0, 4.5, 7.0]).unwrap() - 2.5).abs() < 1e-15);
        assert!(fit_slope(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let g = GalileanLabels {
            p: [0.1, 0.2, 0.3],
            x: [-0.1, 0.0, 0.4],
            t: 0.25,
            e: 3.0,
        };
        let back = GalileanLabels::from_phase_point(&g.phase_point(4.0), 4.0);
        assert_eq!(back, g);
    }

    #[test]
    fn contracted_spatial_algebra_is_exact() {
        // [x_i⋆, p_j⋆] = 2iδ_ij at every scale: no limit involved.
        for i in 1..=3 {
            for j in 1..=3 {
                let x = star_action(&Symbol::x_lower(i), Side::Left, 1.0).unwrap();
                let p = star_action(&Symbol::p_lower(j), Side::Left, 1.0).unwrap();
                let expect = if i == j { DiffOp::identity().scale(2.0 * I) } else { DiffOp::zero() };
                assert_eq!(x.commutator(&p), expect);
            }
        }
    }

    #[test]
    fn boost_residual_is_inverse_square() {
        let r1 = galilean_generator_limit(10.0, 1).unwrap();
        let r2 = galilean_generator_limit(20.0, 1).unwrap();
        assert!((r1.boost_residual / r2.boost_residual - 4.0).abs() < 1e-9);
        assert!((r1.tilde_residual / r2.tilde_residual - 4.0).abs() < 1e-9);
        assert_eq!(r1.commutator_residual, 0.0);
        assert_eq!(r1.hamilton_residual, 0.0);
    }
}
