//! Sparse complex polynomials in the eight phase-space variables.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::NVARS;

/// Exponent vector of a monomial.
pub type Monomial = [u8; NVARS];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Σ c_m z^m with exact zeros removed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Complex64>,
}

pub(crate) fn monomial_degree(m: &Monomial) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, [0; NVARS])
    }

    pub fn monomial(c: Complex64, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    /// Single variable z_i.
    pub fn var(i: usize) -> Self {
        let mut m = [0; NVARS];
        m[i] = 1;
        Self::monomial(Complex64::new(1.0, 0.0), m)
    }

    /// Σ_i coeffs[i] z_i + constant.
    pub fn linear(coeffs: &[Complex64; NVARS], constant: Complex64) -> Self {
        let mut p = Poly::constant(constant);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut m = [0; NVARS];
            m[i] = 1;
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.terms.entry(m).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(monomial_degree).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&[0; NVARS])
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -*c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        if s == ZERO {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = std::array::from_fn(|i| ma[i] + mb[i]);
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut d = *m;
                d[i] -= 1;
                out.add_term(d, c * m[i] as f64);
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c.conj());
        }
        out
    }

    pub fn evaluate(&self, z: &[Complex64; NVARS]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(z)
                    .fold(*c, |acc, (&e, zi)| if e == 0 { acc } else { acc * zi.powu(e as u32) })
            })
            .sum()
    }

    /// Replaces each variable z_i by the polynomial `subs[i]`.
    pub fn substitute(&self, subs: &[Poly; NVARS]) -> Poly {
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::constant(Complex64::new(1.0, 0.0))]; NVARS];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for i in 0..NVARS {
                let e = m[i] as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.mul(&powers[i][e]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }

    /// Drops terms with |c| ≤ tol.
    pub fn pruned(&self, tol: f64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    /// Parts of total degree exactly `d`.
    pub fn homogeneous(&self, d: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| monomial_degree(m) == d)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_and_derivative() {
        let p = Poly::var(0).add(&Poly::var(4));
        let sq = p.mul(&p);
        assert_eq!(sq.len(), 3);
        let d = sq.derivative(0);
        assert_eq!(d, Poly::var(0).scale(c(2.0)).add(&Poly::var(4).scale(c(2.0))));
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = Poly::var(1).sub(&Poly::var(1));
        assert!(p.is_zero());
    }

    #[test]
    fn substitution_matches_evaluation() {
        let p = Poly::var(0).mul(&Poly::var(5)).add(&Poly::constant(c(3.0)));
        let mut subs: [Poly; NVARS] = std::array::from_fn(Poly::var);
        subs[0] = Poly::var(0).add(&Poly::constant(c(1.0)));
        let q = p.substitute(&subs);
        let mut z = [c(0.0); NVARS];
        z[0] = c(2.0);
        z[5] = c(-0.5);
        let mut shifted = z;
        shifted[0] += c(1.0);
        assert_eq!(q.evaluate(&z), p.evaluate(&shifted));
    }
}
