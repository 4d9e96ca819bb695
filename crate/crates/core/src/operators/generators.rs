use num_complex::Complex64;

use super::{OperatorMatrix, I, ONE};
use crate::fock::TruncatedBasis;
use crate::minkowski::MinkowskiMetric;

/// Index pairs (μ, ν) with μ < ν, in the order Ĵ generators are stored.
pub const LORENTZ_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// The annihilation four-vector â^μ (upper index) and the η-creation
/// operators â^{†η}_μ (lower index).
#[derive(Clone, Debug)]
pub struct LadderOps {
    pub lower: [OperatorMatrix; 4],
    pub raise: [OperatorMatrix; 4],
}

impl LadderOps {
    /// â_μ = η_{μν} â^ν, the operator whose η-adjoint is â^{†η}_μ.
    pub fn lowered_annihilator(&self, mu: usize) -> OperatorMatrix {
        self.lower[mu].scale(Complex64::new(MinkowskiMetric::sign(mu), 0.0))
    }
}

/// â^μ|n⟩ = 2√n_μ |n − e_μ⟩ and â^{†η}_μ|n⟩ = 2√(n_μ+1) |n + e_μ⟩, with
/// raising out of the truncation dropped.
pub fn ladder_ops(basis: &TruncatedBasis) -> LadderOps {
    let build = |mu: usize, delta: i32| {
        let mut triplets = Vec::new();
        for (col, n) in basis.indices().iter().enumerate() {
            let Some(m) = n.shifted(mu, delta) else { continue };
            let Some(row) = basis.position(&m) else { continue };
            let occupation = if delta < 0 { n.0[mu] } else { n.0[mu] + 1 };
            triplets.push((row, col, Complex64::new(2.0 * (occupation as f64).sqrt(), 0.0)));
        }
        OperatorMatrix::from_triplets(basis, 1, triplets)
    };
    LadderOps {
        lower: std::array::from_fn(|mu| build(mu, -1)),
        raise: std::array::from_fn(|mu| build(mu, 1)),
    }
}

/// X̂_μ = (η_{μν}â^ν + â^{†η}_μ)/2 and P̂_μ = (η_{μν}â^ν − â^{†η}_μ)/(2i).
pub fn position_momentum(basis: &TruncatedBasis) -> ([OperatorMatrix; 4], [OperatorMatrix; 4]) {
    let ladder = ladder_ops(basis);
    let half = Complex64::new(0.5, 0.0);
    let x = std::array::from_fn(|mu| {
        let eta = Complex64::new(MinkowskiMetric::sign(mu), 0.0);
        ladder.lower[mu]
            .try_combine(eta * half, &ladder.raise[mu], half)
            .expect("same basis")
    });
    let p = std::array::from_fn(|mu| {
        let eta = Complex64::new(MinkowskiMetric::sign(mu), 0.0);
        let k = ONE / (2.0 * I);
        ladder.lower[mu]
            .try_combine(eta * k, &ladder.raise[mu], -k)
            .expect("same basis")
    });
    (x, p)
}

/// N̂_(μ) = diag(n_μ) and N̂ = diag(total(n)).
pub fn number_ops(basis: &TruncatedBasis) -> ([OperatorMatrix; 4], OperatorMatrix) {
    let per_mode = std::array::from_fn(|mu| {
        OperatorMatrix::diagonal(basis, |n| Complex64::new(n.0[mu] as f64, 0.0))
    });
    let total = OperatorMatrix::diagonal(basis, |n| Complex64::new(n.total() as f64, 0.0));
    (per_mode, total)
}

/// The six Ĵ_{μν} = X̂_μP̂_ν − X̂_νP̂_μ for μ < ν.
#[derive(Clone, Debug)]
pub struct LorentzGenerators {
    mats: Vec<OperatorMatrix>,
}

impl LorentzGenerators {
    /// Ĵ_{μν} with the antisymmetry Ĵ_{νμ} = −Ĵ_{μν}; `None` for μ = ν.
    pub fn get(&self, mu: usize, nu: usize) -> Option<OperatorMatrix> {
        if mu == nu {
            return None;
        }
        let (a, b, sign) = if mu < nu { (mu, nu, ONE) } else { (nu, mu, -ONE) };
        let k = LORENTZ_PAIRS.iter().position(|&pair| pair == (a, b))?;
        Some(self.mats[k].scale(sign))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &OperatorMatrix)> {
        LORENTZ_PAIRS.iter().copied().zip(self.mats.iter())
    }
}

/// Ĵ_{μν} assembled from the level-preserving ladder form
/// (1/2i)(η_{νν} â^{†η}_μ â^ν − η_{μμ} â^{†η}_ν â^μ), which equals
/// X̂_μP̂_ν − X̂_νP̂_μ and stays exact on every truncation level. The declared
/// level degree is that of the X̂P̂ product.
pub fn lorentz_generators(basis: &TruncatedBasis) -> LorentzGenerators {
    let ladder = ladder_ops(basis);
    let k = ONE / (2.0 * I);
    let mats = LORENTZ_PAIRS
        .iter()
        .map(|&(mu, nu)| {
            let first = &ladder.raise[mu] * &ladder.lower[nu];
            let second = &ladder.raise[nu] * &ladder.lower[mu];
            let eta_mu = MinkowskiMetric::sign(mu);
            let eta_nu = MinkowskiMetric::sign(nu);
            first
                .try_combine(k * eta_nu, &second, -k * eta_mu)
                .expect("same basis")
                .with_level_degree(2)
        })
        .collect();
    LorentzGenerators { mats }
}

/// Σ_μ η^{μμ}(X̂_μX̂_μ + P̂_μP̂_μ), equal to 4(N̂ + 2) below the guard.
pub fn oscillator_square(basis: &TruncatedBasis) -> OperatorMatrix {
    let (x, p) = position_momentum(basis);
    let mut acc = OperatorMatrix::zero(basis).with_level_degree(2);
    for mu in 0..4 {
        let eta = Complex64::new(MinkowskiMetric::sign(mu), 0.0);
        let sq = &(&x[mu] * &x[mu]) + &(&p[mu] * &p[mu]);
        acc = acc.try_combine(ONE, &sq, eta).expect("same basis");
    }
    acc
}

/// A^{†η} = η̂⁻¹A^†η̂, so entry (i, j) is (−1)^{i₀+j₀} conj(A_{ji}).
pub fn eta_adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    let idx = a.basis().indices();
    let triplets = a
        .entries()
        .map(|(r, c, v)| {
            let s = (idx[r].krein_sign() * idx[c].krein_sign()) as f64;
            (c, r, v.conj() * s)
        })
        .collect();
    OperatorMatrix::from_triplets(a.basis(), a.level_degree(), triplets)
}
