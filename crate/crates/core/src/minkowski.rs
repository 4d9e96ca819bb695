//! Minkowski-metric primitives, Lorentz matrices and the group law of the
//! Heisenberg-Weyl group extended by the Lorentz group.
//!
//! Signature is (−,+,+,+). Index 0 is the time component.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of η_{μν}.
pub const METRIC_DIAGONAL: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance used for membership tests of O(1,3).
pub const LORENTZ_TOLERANCE: f64 = 1e-12;

/// The constant Minkowski metric η_{μν} = diag(−1, 1, 1, 1).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinkowskiMetric;

impl MinkowskiMetric {
    /// η_{μν}; numerically identical to η^{μν}.
    pub fn component(mu: usize, nu: usize) -> f64 {
        if mu == nu {
            METRIC_DIAGONAL[mu]
        } else {
            0.0
        }
    }

    /// Diagonal entry η_{μμ}.
    #[inline]
    pub fn sign(mu: usize) -> f64 {
        METRIC_DIAGONAL[mu]
    }

    pub fn matrix() -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            row[mu] = METRIC_DIAGONAL[mu];
        }
        m
    }

    pub fn lower(v: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| METRIC_DIAGONAL[mu] * v.0[mu]))
    }

    pub fn raise(v: FourVector) -> FourVector {
        // η^{μν} has the same entries as η_{μν}
        Self::lower(v)
    }

    /// η_{μν} a^μ b^ν.
    pub fn dot(a: FourVector, b: FourVector) -> f64 {
        (0..4).map(|mu| METRIC_DIAGONAL[mu] * a.0[mu] * b.0[mu]).sum()
    }

    pub fn square(v: FourVector) -> f64 {
        Self::dot(v, v)
    }
}

/// Four real components indexed by the upper index μ ∈ {0,1,2,3}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        FourVector([v0, v1, v2, v3])
    }

    /// Unit vector along axis `mu`, scaled by `value`.
    pub fn axis(mu: usize, value: f64) -> Self {
        let mut v = [0.0; 4];
        v[mu] = value;
        FourVector(v)
    }

    pub fn dot(self, other: FourVector) -> f64 {
        MinkowskiMetric::dot(self, other)
    }

    pub fn square(self) -> f64 {
        MinkowskiMetric::square(self)
    }

    /// Components with the index lowered, v_μ = η_{μν} v^ν.
    pub fn lowered(self) -> FourVector {
        MinkowskiMetric::lower(self)
    }

    pub fn raised(self) -> FourVector {
        MinkowskiMetric::raise(self)
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, mu: usize) -> &f64 {
        &self.0[mu]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, mu: usize) -> &mut f64 {
        &mut self.0[mu]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| self.0[mu] + rhs.0[mu]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| self.0[mu] - rhs.0[mu]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

/// A real 4×4 matrix Λ^μ_ν satisfying ΛᵀηΛ = η.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzMatrix {
    m: [[f64; 4]; 4],
}

impl LorentzMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            row[mu] = 1.0;
        }
        LorentzMatrix { m }
    }

    /// Checked constructor: accepts any element of O(1,3) to within
    /// [`LORENTZ_TOLERANCE`].
    pub fn from_rows(m: [[f64; 4]; 4]) -> Result<Self> {
        let candidate = LorentzMatrix { m };
        let defect = candidate.metric_defect();
        if !defect.is_finite() || defect > LORENTZ_TOLERANCE {
            return Err(Error::NotLorentz { defect });
        }
        Ok(candidate)
    }

    /// Hyperbolic boost mixing components 0 and `axis` (1, 2 or 3).
    pub fn boost(axis: usize, rapidity: f64) -> Result<Self> {
        if !(1..=3).contains(&axis) {
            return Err(Error::InvalidAxis(axis));
        }
        if !rapidity.is_finite() {
            return Err(Error::NonFinite("rapidity"));
        }
        let mut out = Self::identity();
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        out.m[0][0] = ch;
        out.m[axis][axis] = ch;
        out.m[0][axis] = sh;
        out.m[axis][0] = sh;
        Ok(out)
    }

    /// Rotation by `angle` in the (i, j) spatial plane.
    pub fn rotation(i: usize, j: usize, angle: f64) -> Result<Self> {
        for axis in [i, j] {
            if !(1..=3).contains(&axis) {
                return Err(Error::InvalidAxis(axis));
            }
        }
        if i == j {
            return Err(Error::InvalidAxis(j));
        }
        if !angle.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let mut out = Self::identity();
        let (c, s) = (angle.cos(), angle.sin());
        out.m[i][i] = c;
        out.m[j][j] = c;
        out.m[i][j] = -s;
        out.m[j][i] = s;
        Ok(out)
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    pub fn entry(&self, mu: usize, nu: usize) -> f64 {
        self.m[mu][nu]
    }

    pub fn apply(&self, v: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| {
            (0..4).map(|nu| self.m[mu][nu] * v.0[nu]).sum()
        }))
    }

    pub fn compose(&self, rhs: &LorentzMatrix) -> LorentzMatrix {
        let m = std::array::from_fn(|mu| {
            std::array::from_fn(|nu| (0..4).map(|k| self.m[mu][k] * rhs.m[k][nu]).sum())
        });
        LorentzMatrix { m }
    }

    /// Λ⁻¹ = η Λᵀ η.
    pub fn inverse(&self) -> LorentzMatrix {
        let m = std::array::from_fn(|mu| {
            std::array::from_fn(|nu| METRIC_DIAGONAL[mu] * self.m[nu][mu] * METRIC_DIAGONAL[nu])
        });
        LorentzMatrix { m }
    }

    /// max |(ΛᵀηΛ − η)_{μν}|.
    pub fn metric_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let g: f64 = (0..4)
                    .map(|k| self.m[k][mu] * METRIC_DIAGONAL[k] * self.m[k][nu])
                    .sum();
                worst = worst.max((g - MinkowskiMetric::component(mu, nu)).abs());
            }
        }
        worst
    }

    pub fn is_lorentz(&self) -> bool {
        self.metric_defect() <= LORENTZ_TOLERANCE
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                worst = worst.max((self.m[mu][nu] - other.m[mu][nu]).abs());
            }
        }
        worst
    }
}

impl Default for LorentzMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

/// Element g(p, x, θ, Λ) of the extended Heisenberg-Weyl group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub p: FourVector,
    pub x: FourVector,
    pub theta: f64,
    pub lambda: LorentzMatrix,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            p: FourVector::ZERO,
            x: FourVector::ZERO,
            theta: 0.0,
            lambda: LorentzMatrix::identity(),
        }
    }

    pub fn translation(p: FourVector, x: FourVector, theta: f64) -> Self {
        GroupElement {
            p,
            x,
            theta,
            lambda: LorentzMatrix::identity(),
        }
    }

    /// `self · rhs` with
    /// g(p′,x′,θ′,Λ′) g(p,x,θ,Λ) = g(p′+Λ′p, x′+Λ′x, θ′+θ − x′·Λ′p + p′·Λ′x, Λ′Λ).
    pub fn compose(&self, rhs: &GroupElement) -> GroupElement {
        let lp = self.lambda.apply(rhs.p);
        let lx = self.lambda.apply(rhs.x);
        GroupElement {
            p: self.p + lp,
            x: self.x + lx,
            theta: self.theta + rhs.theta - self.x.dot(lp) + self.p.dot(lx),
            lambda: self.lambda.compose(&rhs.lambda),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = self.lambda.inverse();
        GroupElement {
            p: -inv.apply(self.p),
            x: -inv.apply(self.x),
            theta: -self.theta,
            lambda: inv,
        }
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        (self.p - other.p)
            .max_abs()
            .max((self.x - other.x).max_abs())
            .max((self.theta - other.theta).abs())
            .max(self.lambda.max_abs_diff(&other.lambda))
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

/// Absorbs the representation label ς into the phase-space coordinates.
///
/// For ς > 0 this is (√ς p, √ς x). For ς < 0 the roles of the two
/// generator families are swapped, giving (−√|ς| x, −√|ς| p).
pub fn normalize_representation(
    p: FourVector,
    x: FourVector,
    sigma: f64,
) -> Result<(FourVector, FourVector)> {
    if sigma == 0.0 {
        return Err(Error::ZeroSigma);
    }
    if !sigma.is_finite() {
        return Err(Error::NonFinite("sigma"));
    }
    let root = sigma.abs().sqrt();
    if sigma > 0.0 {
        Ok((p * root, x * root))
    } else {
        Ok((x * -root, p * -root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_squares_to_identity() {
        let m = MinkowskiMetric::matrix();
        for mu in 0..4 {
            for nu in 0..4 {
                let sq: f64 = (0..4).map(|k| m[mu][k] * m[k][nu]).sum();
                assert_eq!(sq, if mu == nu { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn lowering_is_an_involution() {
        let v = FourVector::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(v.lowered().raised(), v);
        assert_eq!(v.lowered()[0], -0.3);
    }

    #[test]
    fn zero_rapidity_boost_is_identity() {
        assert_eq!(LorentzMatrix::boost(1, 0.0).unwrap(), LorentzMatrix::identity());
    }

    #[test]
    fn boost_and_reverse_cancel() {
        let b = LorentzMatrix::boost(1, 0.7).unwrap();
        let r = LorentzMatrix::boost(1, -0.7).unwrap();
        assert!(b.compose(&r).max_abs_diff(&LorentzMatrix::identity()) <= 1e-12);
    }

    #[test]
    fn boost_of_rest_vector() {
        let b = LorentzMatrix::boost(1, 0.2).unwrap();
        let v = b.apply(FourVector::new(1.0, 0.0, 0.0, 0.0));
        assert!((v[0] - 0.2f64.cosh()).abs() < 1e-15);
        assert!((v[1] - 0.2f64.sinh()).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
        assert!((v.square() + 1.0).abs() < 1e-12);
        assert!(b.is_lorentz());
    }

    #[test]
    fn boost_rejects_time_axis_and_nan() {
        assert!(matches!(LorentzMatrix::boost(0, 0.1), Err(Error::InvalidAxis(0))));
        assert!(LorentzMatrix::boost(2, f64::NAN).is_err());
    }

    #[test]
    fn from_rows_rejects_non_lorentz() {
        let mut m = *LorentzMatrix::identity().rows();
        m[0][1] = 0.5;
        assert!(LorentzMatrix::from_rows(m).is_err());
        assert!(LorentzMatrix::from_rows(*LorentzMatrix::boost(3, 1.1).unwrap().rows()).is_ok());
    }

    #[test]
    fn identity_composition() {
        let g = GroupElement {
            p: FourVector::new(0.1, 0.2, -0.3, 0.4),
            x: FourVector::new(-1.0, 0.5, 0.0, 2.0),
            theta: 0.25,
            lambda: LorentzMatrix::boost(2, 0.3).unwrap(),
        };
        assert_eq!(GroupElement::identity().compose(&g), g);
    }

    #[test]
    fn pure_translations_follow_weyl_law() {
        let p1 = FourVector::new(0.1, 0.2, -0.3, 0.4);
        let x1 = FourVector::new(-1.0, 0.5, 0.0, 2.0);
        let p2 = FourVector::new(0.7, -0.1, 0.3, 0.0);
        let x2 = FourVector::new(0.2, 0.2, -0.4, 1.0);
        let g = GroupElement::translation(p1, x1, 0.5)
            .compose(&GroupElement::translation(p2, x2, -0.2));
        assert_eq!(g.p, p1 + p2);
        assert_eq!(g.x, x1 + x2);
        let expected = 0.5 - 0.2 - (x1.dot(p2) - p1.dot(x2));
        assert!((g.theta - expected).abs() < 1e-15);
    }

    #[test]
    fn normalization_branches() {
        let p = FourVector::new(1.0, 2.0, 3.0, 4.0);
        let x = FourVector::new(-1.0, 0.5, 0.25, 0.0);
        assert_eq!(normalize_representation(p, x, 1.0).unwrap(), (p, x));
        assert_eq!(normalize_representation(p, x, 4.0).unwrap(), (p * 2.0, x * 2.0));
        assert_eq!(normalize_representation(p, x, -1.0).unwrap(), (-x, -p));
        assert!(matches!(normalize_representation(p, x, 0.0), Err(Error::ZeroSigma)));
    }
}
