use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::OperatorMatrix;
use crate::error::{Error, Result};
use crate::fock::{krein_inner, KreinVector, TruncatedBasis};
use crate::minkowski::FourVector;

/// Coherent-state label (p^μ, x^μ), both with upper indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: FourVector,
    pub x: FourVector,
}

impl PhasePoint {
    pub fn new(p: FourVector, x: FourVector) -> Self {
        PhasePoint { p, x }
    }

    /// z^μ = x^μ + i p^μ, so that â^μ|p,x⟩ = 2z^μ|p,x⟩.
    pub fn z(&self, mu: usize) -> Complex64 {
        Complex64::new(self.x[mu], self.p[mu])
    }

    /// x·x + p·p with Minkowski squares.
    pub fn minkowski_square(&self) -> f64 {
        self.x.square() + self.p.square()
    }
}

fn power_table(z: Complex64, n_max: usize) -> Vec<Complex64> {
    // z^n / √n!
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    out.push(acc);
    for n in 1..=n_max {
        acc = acc * z / (n as f64).sqrt();
        out.push(acc);
    }
    out
}

/// c_n = e^{−(x·x+p·p)/2} Π_μ (z^μ)^{n_μ}/√(n_μ!).
pub fn coherent_state(basis: &TruncatedBasis, label: &PhasePoint) -> KreinVector<Complex64> {
    let prefactor = (-0.5 * label.minkowski_square()).exp();
    let tables: [Vec<Complex64>; 4] = std::array::from_fn(|mu| power_table(label.z(mu), basis.n_max()));
    let coefficients = basis
        .indices()
        .iter()
        .map(|n| {
            (0..4).fold(Complex64::new(prefactor, 0.0), |acc, mu| {
                acc * tables[mu][n.0[mu] as usize]
            })
        })
        .collect();
    KreinVector::from_coefficients(basis, coefficients).expect("finite coherent coefficients")
}

/// Closed-form ⟨B|A⟩_η =
/// e^{i(x_B·p_A − p_B·x_A)} e^{−½[(x_B−x_A)² + (p_B−p_A)²]}.
pub fn coherent_overlap(a: &PhasePoint, b: &PhasePoint) -> Complex64 {
    let dx = b.x - a.x;
    let dp = b.p - a.p;
    let phase = b.x.dot(a.p) - b.p.dot(a.x);
    let magnitude = (-0.5 * (dx.square() + dp.square())).exp();
    Complex64::from_polar(magnitude, phase)
}

/// The same overlap summed over a truncated Fock basis.
pub fn fock_overlap(basis: &TruncatedBasis, a: &PhasePoint, b: &PhasePoint) -> Complex64 {
    krein_inner(&coherent_state(basis, b), &coherent_state(basis, a)).expect("same basis")
}

/// ⟨v|A|v⟩_η / ⟨v|v⟩_η.
pub fn expectation(op: &OperatorMatrix, v: &KreinVector<Complex64>) -> Result<Complex64> {
    let norm = krein_inner(v, v)?;
    if norm.norm() == 0.0 {
        return Err(Error::InvalidParameter("expectation value in a zero-norm state".into()));
    }
    Ok(krein_inner(v, &op.apply(v)?)? / norm)
}
