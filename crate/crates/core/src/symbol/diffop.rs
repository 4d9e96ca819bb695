use std::collections::BTreeMap;
use std::fmt;

use nalgebra::SMatrix;
use num_complex::Complex64;

use super::{c64, Monomial, Poly, Symbol, NVARS};
use crate::error::{Error, Result};

/// Linear differential operator Σ_D a_D(z) ∂^D with symbol coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<Monomial, Symbol>,
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All multi-indices F ≤ D component-wise.
fn sub_indices(d: &Monomial) -> Vec<Monomial> {
    let mut out = vec![[0u8; NVARS]];
    for i in 0..NVARS {
        let mut next = Vec::with_capacity(out.len() * (d[i] as usize + 1));
        for f in &out {
            for k in 0..=d[i] {
                let mut g = *f;
                g[i] = k;
                next.push(g);
            }
        }
        out = next;
    }
    out
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(Symbol::one())
    }

    /// Multiplication by `a`.
    pub fn multiplication(a: Symbol) -> Self {
        let mut op = DiffOp::zero();
        op.add_term([0; NVARS], a);
        op
    }

    /// c · ∂_i.
    pub fn partial(i: usize, c: Complex64) -> Self {
        let mut d = [0; NVARS];
        d[i] = 1;
        let mut op = DiffOp::zero();
        op.add_term(d, Symbol::constant(c));
        op
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Symbol)>) -> Self {
        let mut op = DiffOp::zero();
        for (d, a) in terms {
            op.add_term(d, a);
        }
        op
    }

    pub fn add_term(&mut self, d: Monomial, a: Symbol) {
        if a.is_zero() {
            return;
        }
        let merged = match self.terms.get(&d) {
            Some(existing) => existing.add(&a),
            None => a,
        };
        if merged.is_zero() {
            self.terms.remove(&d);
        } else {
            self.terms.insert(d, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Symbol)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, d: &Monomial) -> Symbol {
        self.terms.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order present.
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .map(|d| d.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// The multiplier when the operator has no derivative part.
    pub fn as_multiplication(&self) -> Option<Symbol> {
        match self.terms.len() {
            0 => Some(Symbol::zero()),
            1 => self.terms.get(&[0; NVARS]).cloned(),
            _ => None,
        }
    }

    pub fn apply(&self, phi: &Symbol) -> Symbol {
        self.terms
            .iter()
            .fold(Symbol::zero(), |acc, (d, a)| acc.add(&a.mul(&phi.derivative_multi(d))))
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (d, a) in &other.terms {
            out.add_term(*d, a.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(c64(-1.0)))
    }

    pub fn scale(&self, s: Complex64) -> DiffOp {
        Self::from_terms(self.terms.iter().map(|(d, a)| (*d, a.scale(s))))
    }

    /// Left multiplication by a symbol, (a·A)φ = a·(Aφ).
    pub fn premultiply(&self, a: &Symbol) -> DiffOp {
        Self::from_terms(self.terms.iter().map(|(d, b)| (*d, a.mul(b))))
    }

    /// self ∘ other, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (d, a) in &self.terms {
            let subs = sub_indices(d);
            for (e, b) in &other.terms {
                for f in &subs {
                    let weight: f64 = (0..NVARS).map(|i| binomial(d[i], f[i])).product();
                    let db = b.derivative_multi(f);
                    if db.is_zero() {
                        continue;
                    }
                    let target = std::array::from_fn(|i| d[i] - f[i] + e[i]);
                    out.add_term(target, a.mul(&db).scale(c64(weight)));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// Rewrites the operator in new variables z′ related by z = T z′.
    pub fn linear_change(&self, t: &[[f64; NVARS]; NVARS]) -> Result<DiffOp> {
        let tm = SMatrix::<f64, NVARS, NVARS>::from_fn(|i, j| t[i][j]);
        let inv = tm
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("singular change of variables".into()))?;
        // ∂/∂z_i = Σ_j (T⁻¹)_{ji} ∂/∂z′_j
        let first: Vec<DiffOp> = (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .filter(|&j| inv[(j, i)] != 0.0)
                    .fold(DiffOp::zero(), |acc, j| acc.add(&DiffOp::partial(j, c64(inv[(j, i)]))))
            })
            .collect();
        let subs: [Poly; NVARS] = std::array::from_fn(|i| {
            let row = std::array::from_fn(|j| c64(t[i][j]));
            Poly::linear(&row, c64(0.0))
        });
        let mut out = DiffOp::zero();
        for (d, a) in &self.terms {
            let mut op = DiffOp::multiplication(a.substitute(&subs));
            for (i, &k) in d.iter().enumerate() {
                for _ in 0..k {
                    op = op.compose(&first[i]);
                }
            }
            out = out.add(&op);
        }
        Ok(out)
    }

    /// Diagonal change z_i = factors_i · z′_i.
    pub fn scale_variables(&self, factors: &[f64; NVARS]) -> Result<DiffOp> {
        let mut t = [[0.0; NVARS]; NVARS];
        for i in 0..NVARS {
            t[i][i] = factors[i];
        }
        self.linear_change(&t)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, a| m.max(a.max_abs_coeff()))
    }

    pub fn approx_eq(&self, other: &DiffOp, tol: f64) -> bool {
        self.sub(other).max_abs_coeff() <= tol
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; NVARS] = ["p0", "p1", "p2", "p3", "x0", "x1", "x2", "x3"];
        for (k, (d, a)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a})")?;
            for (i, &n) in d.iter().enumerate() {
                for _ in 0..n {
                    write!(f, "*d_{}", NAMES[i])?;
                }
            }
        }
        Ok(())
    }
}
