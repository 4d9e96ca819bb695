//! Truncated four-mode Fock basis with the indefinite inner product
//! ⟨m|n⟩_η = (−1)^{n₀} δ_{mn}.

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operators::OperatorMatrix;

/// Occupation numbers (n₀; n₁, n₂, n₃).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockIndex(pub [u32; 4]);

impl FockIndex {
    pub const VACUUM: FockIndex = FockIndex([0; 4]);

    pub fn new(n0: u32, n1: u32, n2: u32, n3: u32) -> Self {
        FockIndex([n0, n1, n2, n3])
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// (−1)^{n₀}.
    pub fn krein_sign(&self) -> i64 {
        if self.0[0].is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Occupation of mode `mu` shifted by `delta`, or `None` when it would
    /// become negative.
    pub fn shifted(&self, mu: usize, delta: i32) -> Option<FockIndex> {
        let n = self.0[mu] as i64 + delta as i64;
        if n < 0 {
            return None;
        }
        let mut out = *self;
        out.0[mu] = n as u32;
        Some(out)
    }
}

impl fmt::Display for FockIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "|{a};{b},{c},{d}⟩")
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of indices with total exactly `level`.
pub fn level_size(level: usize) -> usize {
    binomial(level + 3, 3)
}

/// All Fock indices with total ≤ N_max, ordered by total degree and then
/// lexicographically. Because of this ordering, every level-bounded
/// sub-basis is a prefix.
#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    n_max: usize,
    indices: Arc<Vec<FockIndex>>,
}

impl PartialEq for TruncatedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n_max == other.n_max
    }
}

impl Eq for TruncatedBasis {}

impl TruncatedBasis {
    pub fn new(n_max: usize) -> Self {
        let mut indices = Vec::with_capacity(Self::size_for(n_max));
        for total in 0..=n_max as u32 {
            for n0 in 0..=total {
                for n1 in 0..=total - n0 {
                    for n2 in 0..=total - n0 - n1 {
                        indices.push(FockIndex([n0, n1, n2, total - n0 - n1 - n2]));
                    }
                }
            }
        }
        TruncatedBasis {
            n_max,
            indices: Arc::new(indices),
        }
    }

    /// C(N_max + 4, 4).
    pub fn size_for(n_max: usize) -> usize {
        binomial(n_max + 4, 4)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[FockIndex] {
        &self.indices
    }

    pub fn index(&self, position: usize) -> FockIndex {
        self.indices[position]
    }

    /// Position of `n` in the ordering, computed by counting.
    pub fn position(&self, n: &FockIndex) -> Option<usize> {
        let t = n.total();
        if t > self.n_max {
            return None;
        }
        let [n0, n1, n2, _] = n.0.map(|v| v as usize);
        let mut rank = Self::size_for_level_below(t);
        // Compositions of the remainder over the trailing modes.
        rank += (0..n0).map(|a| binomial(t - a + 2, 2)).sum::<usize>();
        rank += (0..n1).map(|b| t - n0 - b + 1).sum::<usize>();
        rank += n2;
        Some(rank)
    }

    fn size_for_level_below(level: usize) -> usize {
        if level == 0 {
            0
        } else {
            Self::size_for(level - 1)
        }
    }

    /// Number of leading positions with total ≤ `level`.
    pub fn prefix_len(&self, level: usize) -> usize {
        Self::size_for(level.min(self.n_max))
    }

    pub fn check_same(&self, other: &TruncatedBasis) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::BasisMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(())
    }
}

/// Counts of negative- and positive-norm basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KreinSignature {
    #[serde(rename = "L")]
    pub negative: usize,
    #[serde(rename = "M")]
    pub positive: usize,
}

pub fn signature(basis: &TruncatedBasis) -> KreinSignature {
    let negative = basis.indices().iter().filter(|n| n.krein_sign() < 0).count();
    KreinSignature {
        negative,
        positive: basis.len() - negative,
    }
}

/// Scalars admissible as Krein-vector coefficients. Integer types keep the
/// inner product exact.
pub trait KreinScalar:
    Copy + PartialEq + fmt::Debug + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn conj(self) -> Self;
    fn to_complex(self) -> Complex64;
    fn is_finite(self) -> bool;
}

impl KreinScalar for i64 {
    fn zero() -> Self {
        0
    }
    fn conj(self) -> Self {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self as f64, 0.0)
    }
    fn is_finite(self) -> bool {
        true
    }
}

impl KreinScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl KreinScalar for Complex<i64> {
    fn zero() -> Self {
        Complex::new(0, 0)
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
    fn is_finite(self) -> bool {
        true
    }
}

impl KreinScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn is_finite(self) -> bool {
        Complex::is_finite(self)
    }
}

/// Coefficients over a [`TruncatedBasis`]. No normalization is imposed.
#[derive(Clone, Debug, PartialEq)]
pub struct KreinVector<T = Complex64> {
    basis: TruncatedBasis,
    coefficients: Vec<T>,
}

impl<T: KreinScalar> KreinVector<T> {
    pub fn zeros(basis: &TruncatedBasis) -> Self {
        KreinVector {
            basis: basis.clone(),
            coefficients: vec![T::zero(); basis.len()],
        }
    }

    pub fn from_coefficients(basis: &TruncatedBasis, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coefficients.len()
            )));
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("coefficient"));
        }
        Ok(KreinVector {
            basis: basis.clone(),
            coefficients,
        })
    }

    /// Basis vector e_n scaled by `value`. Panics if `n` is outside the basis.
    pub fn basis_vector(basis: &TruncatedBasis, n: FockIndex, value: T) -> Self {
        let mut v = Self::zeros(basis);
        let pos = basis
            .position(&n)
            .unwrap_or_else(|| panic!("{n} lies above N_max = {}", basis.n_max()));
        v.coefficients[pos] = value;
        v
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [T] {
        &mut self.coefficients
    }

    pub fn get(&self, n: &FockIndex) -> Option<T> {
        self.basis.position(n).map(|p| self.coefficients[p])
    }

    pub fn to_complex(&self) -> KreinVector<Complex64> {
        KreinVector {
            basis: self.basis.clone(),
            coefficients: self.coefficients.iter().map(|c| c.to_complex()).collect(),
        }
    }
}

/// Σ_n (−1)^{n₀} conj(ψ_n) φ_n, exact for integer scalars.
pub fn krein_inner<T: KreinScalar>(psi: &KreinVector<T>, phi: &KreinVector<T>) -> Result<T> {
    psi.basis.check_same(&phi.basis)?;
    let mut acc = T::zero();
    for ((n, a), b) in psi
        .basis
        .indices()
        .iter()
        .zip(&psi.coefficients)
        .zip(&phi.coefficients)
    {
        let term = a.conj() * *b;
        acc = if n.krein_sign() < 0 { acc + -term } else { acc + term };
    }
    Ok(acc)
}

/// Plain Σ conj(ψ_n) φ_n.
pub fn euclidean_inner<T: KreinScalar>(psi: &KreinVector<T>, phi: &KreinVector<T>) -> Result<T> {
    psi.basis.check_same(&phi.basis)?;
    Ok(psi
        .coefficients
        .iter()
        .zip(&phi.coefficients)
        .fold(T::zero(), |acc, (a, b)| acc + a.conj() * *b))
}

/// η̂ = Σ (−1)^{n₀} |n⟩⟨n|.
pub fn metric_operator(basis: &TruncatedBasis) -> OperatorMatrix {
    OperatorMatrix::diagonal(basis, |n| Complex64::new(n.krein_sign() as f64, 0.0))
}

/// Projector onto the span of basis states with n₀ even.
pub fn positive_norm_projector(basis: &TruncatedBasis) -> OperatorMatrix {
    OperatorMatrix::diagonal(basis, |n| {
        Complex64::new(if n.krein_sign() > 0 { 1.0 } else { 0.0 }, 0.0)
    })
}

impl KreinVector<Complex64> {
    /// `{basis: N_max, coefficients: [[n0,n1,n2,n3,re,im], ...]}`, one row
    /// per basis element in basis order.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .basis
            .indices()
            .iter()
            .zip(&self.coefficients)
            .map(|(n, c)| json!([n.0[0], n.0[1], n.0[2], n.0[3], c.re, c.im]))
            .collect();
        json!({ "basis": self.basis.n_max(), "coefficients": rows })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("KreinVector JSON: {msg}"));
        let n_max = value["basis"].as_u64().ok_or_else(|| bad("missing basis"))? as usize;
        let basis = TruncatedBasis::new(n_max);
        let mut v = Self::zeros(&basis);
        let rows = value["coefficients"]
            .as_array()
            .ok_or_else(|| bad("missing coefficients"))?;
        for row in rows {
            let row = row.as_array().filter(|r| r.len() == 6).ok_or_else(|| bad("row shape"))?;
            let mut n = [0u32; 4];
            for (slot, entry) in n.iter_mut().zip(row) {
                *slot = entry.as_u64().ok_or_else(|| bad("index"))? as u32;
            }
            let re = row[4].as_f64().ok_or_else(|| bad("re"))?;
            let im = row[5].as_f64().ok_or_else(|| bad("im"))?;
            let pos = basis
                .position(&FockIndex(n))
                .ok_or_else(|| bad("index above N_max"))?;
            v.coefficients[pos] = Complex64::new(re, im);
        }
        Ok(v)
    }
}
