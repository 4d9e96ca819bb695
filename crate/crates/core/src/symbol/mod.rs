//! Exponential-polynomial phase-space symbols and the star-product calculus
//! acting on them.
//!
//! Variables are ordered (p⁰, p¹, p², p³, x⁰, x¹, x², x³), all with upper
//! indices. A [`Symbol`] is a finite sum Σ_k P_k(z) e^{Q_k(z)} with
//! polynomial P_k and Q_k of degree ≤ 2 without constant term.

mod diffop;
mod flow;
mod poly;
mod star;

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiMetric;

pub use diffop::DiffOp;
pub use flow::{
    free_hamiltonian, heisenberg_flow, klein_gordon_check, plane_wave, schrodinger_flow,
    translation_flow, vl_shift, KleinGordonReport,
};
pub use poly::{Monomial, Poly};
pub use star::{
    generator_table, generator_table_residuals, left_right_commutator, moyal_bracket, normalized_regular_action,
    poisson_bracket, regular_rep_action, scaled_moyal_bracket, star_action, star_apply,
    star_product, structure_constants, tilde, GeneratorEntry, GeneratorId, RegularGenerator,
    Side, TableResiduals,
};

/// Number of phase-space variables.
pub const NVARS: usize = 8;

/// Tolerance for identifying two exponents as equal when merging terms.
pub const EXPONENT_TOL: f64 = 1e-12;

const VAR_NAMES: [&str; NVARS] = ["p0", "p1", "p2", "p3", "x0", "x1", "x2", "x3"];

/// Slot of p^μ.
pub const fn p_var(mu: usize) -> usize {
    mu
}

/// Slot of x^μ.
pub const fn x_var(mu: usize) -> usize {
    4 + mu
}

/// The slot holding the partner variable (p^μ ↔ x^μ).
pub const fn partner(i: usize) -> usize {
    (i + 4) % NVARS
}

pub(crate) fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) const CI: Complex64 = Complex64::new(0.0, 1.0);

fn exponent_key_cmp(a: &Poly, b: &Poly) -> Ordering {
    let ka = a.terms().map(|(m, c)| (*m, c.re.to_bits(), c.im.to_bits()));
    let kb = b.terms().map(|(m, c)| (*m, c.re.to_bits(), c.im.to_bits()));
    ka.cmp(kb)
}

fn exponents_match(a: &Poly, b: &Poly) -> bool {
    a.sub(b).max_abs() <= EXPONENT_TOL
}

/// Finite sum of polynomial × exp(quadratic) terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol {
    /// (exponent, prefactor) pairs, sorted by exponent.
    groups: Vec<(Poly, Poly)>,
}

impl Symbol {
    pub fn zero() -> Self {
        Symbol::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(c64(1.0))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::from_groups(vec![(Poly::zero(), p)])
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(Poly::var(i))
    }

    /// p^μ.
    pub fn p_upper(mu: usize) -> Self {
        Self::var(p_var(mu))
    }

    /// x^μ.
    pub fn x_upper(mu: usize) -> Self {
        Self::var(x_var(mu))
    }

    /// p_μ = η_{μμ} p^μ.
    pub fn p_lower(mu: usize) -> Self {
        Self::p_upper(mu).scale(c64(MinkowskiMetric::sign(mu)))
    }

    /// x_μ = η_{μμ} x^μ.
    pub fn x_lower(mu: usize) -> Self {
        Self::x_upper(mu).scale(c64(MinkowskiMetric::sign(mu)))
    }

    /// e^{q} for a polynomial q of degree ≤ 2. The constant part of q is
    /// moved into the prefactor.
    pub fn exp_of(q: &Poly) -> Result<Self> {
        Self::poly_times_exp(Poly::constant(c64(1.0)), q)
    }

    /// P e^{q}, deg q ≤ 2.
    pub fn poly_times_exp(p: Poly, q: &Poly) -> Result<Self> {
        if q.degree() > 2 {
            return Err(Error::InvalidParameter("exponent degree above 2".into()));
        }
        let k = q.constant_term();
        let exponent = q.sub(&Poly::constant(k));
        Ok(Self::from_groups(vec![(exponent, p.scale(k.exp()))]))
    }

    fn from_groups(groups: Vec<(Poly, Poly)>) -> Self {
        let mut s = Symbol { groups: Vec::new() };
        for (e, p) in groups {
            s.push_group(e, p);
        }
        s.groups.sort_by(|a, b| exponent_key_cmp(&a.0, &b.0));
        s
    }

    fn push_group(&mut self, exponent: Poly, p: Poly) {
        if p.is_zero() {
            return;
        }
        if let Some(pos) = self.groups.iter().position(|(e, _)| exponents_match(e, &exponent)) {
            let merged = self.groups[pos].1.add(&p);
            if merged.is_zero() {
                self.groups.remove(pos);
            } else {
                self.groups[pos].1 = merged;
            }
        } else {
            self.groups.push((exponent, p));
        }
    }

    /// (exponent, prefactor) pairs in canonical order.
    pub fn groups(&self) -> &[(Poly, Poly)] {
        &self.groups
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// The polynomial if there is no exponential factor.
    pub fn as_polynomial(&self) -> Option<Poly> {
        match self.groups.as_slice() {
            [] => Some(Poly::zero()),
            [(e, p)] if e.is_zero() => Some(p.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.as_polynomial().is_some()
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        let mut groups = self.groups.clone();
        groups.extend(other.groups.iter().cloned());
        Self::from_groups(groups)
    }

    pub fn sub(&self, other: &Symbol) -> Symbol {
        self.add(&other.scale(c64(-1.0)))
    }

    pub fn scale(&self, s: Complex64) -> Symbol {
        Self::from_groups(self.groups.iter().map(|(e, p)| (e.clone(), p.scale(s))).collect())
    }

    pub fn mul(&self, other: &Symbol) -> Symbol {
        let mut groups = Vec::with_capacity(self.groups.len() * other.groups.len());
        for (ea, pa) in &self.groups {
            for (eb, pb) in &other.groups {
                groups.push((ea.add(eb), pa.mul(pb)));
            }
        }
        Self::from_groups(groups)
    }

    pub fn mul_poly(&self, p: &Poly) -> Symbol {
        Self::from_groups(self.groups.iter().map(|(e, q)| (e.clone(), q.mul(p))).collect())
    }

    /// ∂/∂z_i.
    pub fn derivative(&self, i: usize) -> Symbol {
        Self::from_groups(
            self.groups
                .iter()
                .map(|(e, p)| (e.clone(), p.derivative(i).add(&p.mul(&e.derivative(i)))))
                .collect(),
        )
    }

    /// ∂^D for a multi-index D.
    pub fn derivative_multi(&self, d: &Monomial) -> Symbol {
        let mut out = self.clone();
        for (i, &k) in d.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(i);
            }
        }
        out
    }

    pub fn evaluate(&self, z: &[Complex64; NVARS]) -> Complex64 {
        self.groups
            .iter()
            .map(|(e, p)| p.evaluate(z) * e.evaluate(z).exp())
            .sum()
    }

    pub fn evaluate_real(&self, z: &[f64; NVARS]) -> Complex64 {
        self.evaluate(&z.map(c64))
    }

    /// Complex conjugate as a function of real variables.
    pub fn conj(&self) -> Symbol {
        Self::from_groups(self.groups.iter().map(|(e, p)| (e.conj(), p.conj())).collect())
    }

    /// z ↦ α(M z + c).
    pub fn substitute_affine(&self, m: &[[Complex64; NVARS]; NVARS], shift: &[Complex64; NVARS]) -> Symbol {
        let subs: [Poly; NVARS] = std::array::from_fn(|i| Poly::linear(&m[i], shift[i]));
        self.substitute(&subs)
    }

    /// Replaces each variable by an affine polynomial.
    pub fn substitute(&self, subs: &[Poly; NVARS]) -> Symbol {
        debug_assert!(subs.iter().all(|s| s.degree() <= 1));
        let mut groups = Vec::with_capacity(self.groups.len());
        for (e, p) in &self.groups {
            let q = e.substitute(subs);
            let k = q.constant_term();
            groups.push((q.sub(&Poly::constant(k)), p.substitute(subs).scale(k.exp())));
        }
        Self::from_groups(groups)
    }

    /// Substitution z_i ↦ z_i + shift_i.
    pub fn shift(&self, shift: &[Complex64; NVARS]) -> Symbol {
        let subs: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(i).add(&Poly::constant(shift[i])));
        self.substitute(&subs)
    }

    /// Substitution z_i ↦ factors_i · z_i.
    pub fn scale_variables(&self, factors: &[f64; NVARS]) -> Symbol {
        let subs: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(i).scale(c64(factors[i])));
        self.substitute(&subs)
    }

    /// Largest coefficient modulus over all prefactors.
    pub fn max_abs_coeff(&self) -> f64 {
        self.groups.iter().fold(0.0, |m, (_, p)| m.max(p.max_abs()))
    }

    pub fn approx_eq(&self, other: &Symbol, tol: f64) -> bool {
        self.sub(other).max_abs_coeff() <= tol
    }

    pub fn pruned(&self, tol: f64) -> Symbol {
        Self::from_groups(self.groups.iter().map(|(e, p)| (e.clone(), p.pruned(tol))).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.groups.iter().all(|(e, p)| e.is_finite() && p.is_finite())
    }

    /// True when no exponent couples variables of different μ and every
    /// prefactor monomial is a product of single-μ pieces (always true).
    pub fn factorizes_by_component(&self) -> bool {
        self.groups.iter().all(|(e, _)| {
            e.terms().all(|(m, _)| {
                let comps: Vec<usize> = (0..NVARS).filter(|&i| m[i] > 0).map(|i| i % 4).collect();
                comps.windows(2).all(|w| w[0] == w[1])
            })
        })
    }
}

fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn fmt_coeff(c: Complex64) -> (bool, String) {
    if c.im == 0.0 {
        (c.re < 0.0, fmt_real(c.re.abs()))
    } else if c.re == 0.0 {
        (c.im < 0.0, format!("{}i", fmt_real(c.im.abs())))
    } else {
        let sign = if c.im < 0.0 { "-" } else { "+" };
        (false, format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs())))
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let parts: Vec<String> = (0..NVARS)
        .filter(|&i| m[i] > 0)
        .map(|i| {
            if m[i] == 1 {
                VAR_NAMES[i].to_string()
            } else {
                format!("{}^{}", VAR_NAMES[i], m[i])
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let (negative, coeff) = fmt_coeff(*c);
            let mono = fmt_monomial(m);
            let body = match (mono.is_empty(), coeff.as_str()) {
                (true, _) => coeff.clone(),
                (false, "1") => mono,
                (false, _) => format!("{coeff}*{mono}"),
            };
            match (k, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Canonical text form: groups in exponent order, monomials in a fixed
/// variable order, coefficients in shortest round-trip notation.
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, p)) in self.groups.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{p}")?;
            } else if self.groups.len() == 1 && p.len() == 1 && p.constant_term() == c64(1.0) {
                write!(f, "exp({e})")?;
            } else {
                write!(f, "({p})*exp({e})")?;
            }
        }
        Ok(())
    }
}
