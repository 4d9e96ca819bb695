//! Sparse operator realizations on a [`TruncatedBasis`].

mod coherent;
mod expm;
mod generators;
mod spectrum;
mod verify;

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockIndex, KreinVector, TruncatedBasis};

pub use coherent::{
    coherent_overlap, coherent_state, expectation, fock_overlap, PhasePoint,
};
pub use expm::{
    boost_exponential, expm_columns, expm_dense, weyl_displacement, weyl_displacement_guarded,
    ExpmOptions, DENSE_EXPM_LIMIT,
};
pub use generators::{
    eta_adjoint, ladder_ops, lorentz_generators, number_ops, oscillator_square,
    position_momentum, LadderOps, LorentzGenerators, LORENTZ_PAIRS,
};
pub use spectrum::{guarded_spectrum, level_block_spectra, spectrum_dense, LevelSpectrum};
pub use verify::{pseudo_unitarity_residual, verify_algebra, AlgebraReport, IdentityResidual};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Compressed-row sparse complex matrix over a truncated Fock basis.
///
/// `level_degree` bounds |Δ total(n)| between connected basis states. It is
/// additive under products and the maximum under sums.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    basis: TruncatedBasis,
    level_degree: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl OperatorMatrix {
    /// Builds from (row, col, value) triplets. Duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(
        basis: &TruncatedBasis,
        level_degree: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let dim = basis.len();
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows_of.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        OperatorMatrix {
            basis: basis.clone(),
            level_degree,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        }
    }

    pub fn zero(basis: &TruncatedBasis) -> Self {
        Self::from_triplets(basis, 0, Vec::new())
    }

    pub fn identity(basis: &TruncatedBasis) -> Self {
        Self::diagonal(basis, |_| ONE)
    }

    pub fn diagonal(basis: &TruncatedBasis, f: impl Fn(&FockIndex) -> Complex64) -> Self {
        let triplets = basis
            .indices()
            .iter()
            .enumerate()
            .map(|(i, n)| (i, i, f(n)))
            .collect();
        Self::from_triplets(basis, 0, triplets)
    }

    /// Dense import; the level degree is measured from the nonzero pattern.
    pub fn from_dense(basis: &TruncatedBasis, m: &DMatrix<Complex64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != ZERO {
                    triplets.push((r, c, v));
                }
            }
        }
        let mut out = Self::from_triplets(basis, 0, triplets);
        out.level_degree = out.measured_level_degree();
        out
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn level_degree(&self) -> usize {
        self.level_degree
    }

    pub fn with_level_degree(mut self, level_degree: usize) -> Self {
        self.level_degree = level_degree;
        self
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates over stored (row, col, value) entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// Largest |Δ total| actually present among nonzero entries.
    pub fn measured_level_degree(&self) -> usize {
        let idx = self.basis.indices();
        self.entries()
            .map(|(r, c, _)| idx[r].total().abs_diff(idx[c].total()))
            .max()
            .unwrap_or(0)
    }

    pub fn apply_slice(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|r| self.row(r).map(|(c, a)| a * v[c]).sum())
            .collect()
    }

    pub fn apply(&self, v: &KreinVector<Complex64>) -> Result<KreinVector<Complex64>> {
        self.basis.check_same(v.basis())?;
        KreinVector::from_coefficients(&self.basis, self.apply_slice(v.coefficients()))
    }

    pub fn try_mul(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.basis.check_same(&rhs.basis)?;
        let dim = self.dim();
        let mut acc = vec![ZERO; dim];
        let mut touched = vec![false; dim];
        let mut pattern = Vec::new();
        let mut triplets = Vec::new();
        for r in 0..dim {
            for (k, a) in self.row(r) {
                for (c, b) in rhs.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                triplets.push((r, c, acc[c]));
                acc[c] = ZERO;
                touched[c] = false;
            }
            pattern.clear();
        }
        Ok(Self::from_triplets(
            &self.basis,
            self.level_degree + rhs.level_degree,
            triplets,
        ))
    }

    /// α·self + β·rhs.
    pub fn try_combine(
        &self,
        alpha: Complex64,
        rhs: &OperatorMatrix,
        beta: Complex64,
    ) -> Result<OperatorMatrix> {
        self.basis.check_same(&rhs.basis)?;
        let triplets = self
            .entries()
            .map(|(r, c, v)| (r, c, alpha * v))
            .chain(rhs.entries().map(|(r, c, v)| (r, c, beta * v)))
            .collect();
        Ok(Self::from_triplets(
            &self.basis,
            self.level_degree.max(rhs.level_degree),
            triplets,
        ))
    }

    pub fn scale(&self, s: Complex64) -> OperatorMatrix {
        if s == ZERO {
            return Self::zero(&self.basis).with_level_degree(self.level_degree);
        }
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn commutator(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        &(self * rhs) - &(rhs * self)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> OperatorMatrix {
        let triplets = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(&self.basis, self.level_degree, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim(), self.dim(), ZERO);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Dense copy of the leading `len × len` block.
    pub fn dense_block(&self, len: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(len, len, ZERO);
        for r in 0..len {
            for (c, v) in self.row(r) {
                if c < len {
                    m[(r, c)] = v;
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Maximum absolute column sum, the induced 1-norm.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.dim()];
        for (_, c, v) in self.entries() {
            sums[c] += v.norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Max |self − other| over all entries.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        (self - other).max_abs()
    }

    /// Entry-wise equality of sparse patterns and values to within `tol`.
    pub fn approx_eq(&self, other: &OperatorMatrix, tol: f64) -> bool {
        self.basis == other.basis && self.max_abs_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).expect("operator basis mismatch")
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_combine(ONE, rhs, ONE).expect("operator basis mismatch")
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_combine(ONE, rhs, -ONE).expect("operator basis mismatch")
    }
}

/// Basis states with total ≤ N_max − guard.
///
/// With the degree-then-lex ordering this is a prefix of the basis. An
/// identity that is exact on the infinite space and involves operators of
/// combined level degree ≤ `guard` holds exactly on these columns.
#[derive(Clone, Debug)]
pub struct GuardedSubspace {
    basis: TruncatedBasis,
    guard: usize,
    len: usize,
}

impl GuardedSubspace {
    pub fn new(basis: &TruncatedBasis, guard: usize) -> Self {
        let len = if guard > basis.n_max() {
            0
        } else {
            basis.prefix_len(basis.n_max() - guard)
        };
        GuardedSubspace {
            basis: basis.clone(),
            guard,
            len,
        }
    }

    /// Subspace covering the whole basis, i.e. no truncation guard.
    pub fn unguarded(basis: &TruncatedBasis) -> Self {
        GuardedSubspace {
            basis: basis.clone(),
            guard: 0,
            len: basis.len(),
        }
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn contains(&self, position: usize) -> bool {
        position < self.len
    }

    /// Highest total level inside the subspace.
    pub fn top_level(&self) -> Option<usize> {
        (self.len > 0).then(|| self.basis.n_max() - self.guard)
    }

    /// max |A_{rc}| over guarded columns c and every row r.
    pub fn column_residual(&self, a: &OperatorMatrix) -> f64 {
        a.entries()
            .filter(|&(_, c, _)| self.contains(c))
            .fold(0.0, |m, (_, _, v)| m.max(v.norm()))
    }

    /// max |A_{rc}| with both r and c guarded.
    pub fn block_residual(&self, a: &OperatorMatrix) -> f64 {
        a.entries()
            .filter(|&(r, c, _)| self.contains(r) && self.contains(c))
            .fold(0.0, |m, (_, _, v)| m.max(v.norm()))
    }

    /// max |v_n| over guarded positions.
    pub fn vector_residual(&self, v: &[Complex64]) -> f64 {
        v[..self.len].iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

pub(crate) fn check_finite_label(v: &crate::minkowski::FourVector, what: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let b = TruncatedBasis::new(1);
        let m = OperatorMatrix::from_triplets(
            &b,
            0,
            vec![(0, 1, ONE), (0, 1, ONE), (2, 2, ONE), (2, 2, -ONE), (4, 0, I)],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(2, 2), ZERO);
        assert_eq!(m.get(4, 0), I);
    }

    #[test]
    fn sparse_product_matches_dense() {
        let b = TruncatedBasis::new(2);
        let (x, p) = position_momentum(&b);
        let prod = &x[1] * &p[2];
        let dense = x[1].to_dense() * p[2].to_dense();
        assert!((prod.to_dense() - dense).camax() < 1e-14);
        assert_eq!(prod.level_degree(), 2);
    }

    #[test]
    fn guarded_subspace_is_prefix() {
        let b = TruncatedBasis::new(5);
        let g = GuardedSubspace::new(&b, 2);
        assert_eq!(g.len(), TruncatedBasis::size_for(3));
        assert_eq!(g.top_level(), Some(3));
        assert!(GuardedSubspace::new(&b, 6).is_empty());
    }
}
