use num_complex::Complex64;
use serde::Serialize;

use super::{
    eta_adjoint, ladder_ops, lorentz_generators, number_ops, position_momentum, GuardedSubspace,
    OperatorMatrix, I, ONE, ZERO,
};
use crate::error::Result;
use crate::fock::TruncatedBasis;
use crate::minkowski::MinkowskiMetric;

/// Worst residual of one identity family.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub guard: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub n_max: usize,
    pub guarded: bool,
    pub entries: Vec<IdentityResidual>,
}

impl AlgebraReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_residual))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.max_residual <= tol)
    }
}

fn eta(mu: usize, nu: usize) -> Complex64 {
    Complex64::new(MinkowskiMetric::component(mu, nu), 0.0)
}

fn delta(mu: usize, nu: usize) -> f64 {
    if mu == nu {
        1.0
    } else {
        0.0
    }
}

fn combo(basis: &TruncatedBasis, terms: &[(Complex64, &OperatorMatrix)]) -> OperatorMatrix {
    terms.iter().fold(OperatorMatrix::zero(basis), |acc, (c, m)| {
        if *c == ZERO {
            acc
        } else {
            acc.try_combine(ONE, m, *c).expect("same basis")
        }
    })
}

struct Checker {
    basis: TruncatedBasis,
    respect_guard: bool,
    entries: Vec<IdentityResidual>,
}

impl Checker {
    fn subspace(&self, guard: usize) -> GuardedSubspace {
        if self.respect_guard {
            GuardedSubspace::new(&self.basis, guard)
        } else {
            GuardedSubspace::unguarded(&self.basis)
        }
    }

    /// Records max over `diffs` of the guarded column residual.
    fn record(&mut self, identity: &str, guard: usize, diffs: impl IntoIterator<Item = OperatorMatrix>) {
        let sub = self.subspace(guard);
        let max_residual = diffs
            .into_iter()
            .fold(0.0f64, |m, d| m.max(sub.column_residual(&d)));
        self.entries.push(IdentityResidual {
            identity: identity.to_string(),
            guard: sub.guard(),
            max_residual,
        });
    }
}

/// Evaluates every commutator of the covariant Heisenberg-Weyl algebra with
/// its Lorentz extension, plus the ladder and number-operator relations.
///
/// Each identity is compared on the guarded subspace whose guard equals the
/// total level degree of the commutator. With `respect_guard = false` the
/// whole truncated basis is used instead, exposing truncation artifacts.
pub fn verify_algebra(basis: &TruncatedBasis, respect_guard: bool) -> AlgebraReport {
    let id = OperatorMatrix::identity(basis);
    let (x, p) = position_momentum(basis);
    let ladder = ladder_ops(basis);
    let (nmu, ntot) = number_ops(basis);
    let j = lorentz_generators(basis);
    let jm = |m: usize, n: usize| j.get(m, n).unwrap_or_else(|| OperatorMatrix::zero(basis));
    let two_i = 2.0 * I;

    let mut ck = Checker {
        basis: basis.clone(),
        respect_guard,
        entries: Vec::new(),
    };

    let pairs = |f: &dyn Fn(usize, usize) -> OperatorMatrix| {
        (0..4).flat_map(move |m| (0..4).map(move |n| (m, n))).map(|(m, n)| f(m, n)).collect::<Vec<_>>()
    };

    ck.record("[X_mu, X_nu] = 0", 2, pairs(&|m, n| x[m].commutator(&x[n])));
    ck.record("[P_mu, P_nu] = 0", 2, pairs(&|m, n| p[m].commutator(&p[n])));
    ck.record(
        "[X_mu, P_nu] = 2i eta_mu_nu I",
        2,
        pairs(&|m, n| &x[m].commutator(&p[n]) - &id.scale(two_i * eta(m, n))),
    );

    let mut jx = Vec::new();
    let mut jp = Vec::new();
    for &(m, n) in &super::LORENTZ_PAIRS {
        let jmn = jm(m, n);
        for r in 0..4 {
            let rhs_x = combo(basis, &[(two_i * eta(m, r), &x[n]), (-two_i * eta(n, r), &x[m])]);
            jx.push(&jmn.commutator(&x[r]) - &rhs_x);
            let rhs_p = combo(basis, &[(two_i * eta(m, r), &p[n]), (-two_i * eta(n, r), &p[m])]);
            jp.push(&jmn.commutator(&p[r]) - &rhs_p);
        }
    }
    ck.record("[J_mu_nu, X_rho] = 2i(eta_mu_rho X_nu - eta_nu_rho X_mu)", 3, jx);
    ck.record("[J_mu_nu, P_rho] = 2i(eta_mu_rho P_nu - eta_nu_rho P_mu)", 3, jp);

    let mut jj = Vec::new();
    for &(m, n) in &super::LORENTZ_PAIRS {
        for &(r, s) in &super::LORENTZ_PAIRS {
            let (j_mr, j_ns, j_ms, j_nr) = (jm(m, r), jm(n, s), jm(m, s), jm(n, r));
            let rhs = combo(
                basis,
                &[
                    (two_i * eta(n, s), &j_mr),
                    (two_i * eta(m, r), &j_ns),
                    (-two_i * eta(m, s), &j_nr),
                    (-two_i * eta(n, r), &j_ms),
                ],
            );
            jj.push(&jm(m, n).commutator(&jm(r, s)) - &rhs);
        }
    }
    ck.record(
        "[J_mu_nu, J_rho_sigma] = 2i(eta_nu_sigma J_mu_rho + eta_mu_rho J_nu_sigma - eta_mu_sigma J_nu_rho - eta_nu_rho J_mu_sigma)",
        4,
        jj,
    );

    let a = &ladder.lower;
    let ad = &ladder.raise;
    ck.record(
        "[a^mu, a+_nu] = 4 delta^mu_nu I",
        2,
        pairs(&|m, n| &a[m].commutator(&ad[n]) - &id.scale(ONE * (4.0 * delta(m, n)))),
    );
    ck.record("[a^mu, a^nu] = 0", 2, pairs(&|m, n| a[m].commutator(&a[n])));
    ck.record("[a+_mu, a+_nu] = 0", 2, pairs(&|m, n| ad[m].commutator(&ad[n])));
    ck.record(
        "[N_(mu), a^nu] = -delta a^mu",
        1,
        pairs(&|m, n| &nmu[m].commutator(&a[n]) + &a[m].scale(ONE * delta(m, n))),
    );
    ck.record(
        "[N_(mu), a+_nu] = delta a+_mu",
        1,
        pairs(&|m, n| &nmu[m].commutator(&ad[n]) - &ad[m].scale(ONE * delta(m, n))),
    );
    ck.record(
        "N_(mu) = a+_mu a^mu / 4",
        1,
        (0..4).map(|m| &(&ad[m] * &a[m]).scale(ONE * 0.25) - &nmu[m]),
    );
    ck.record(
        "N = sum_mu N_(mu)",
        0,
        [&combo(basis, &[(ONE, &nmu[0]), (ONE, &nmu[1]), (ONE, &nmu[2]), (ONE, &nmu[3])]) - &ntot],
    );

    let generators = x
        .iter()
        .chain(p.iter())
        .chain(j.iter().map(|(_, m)| m))
        .chain(std::iter::once(&ntot));
    ck.record(
        "eta_adjoint(G) = G for G in {X, P, J, N}",
        0,
        generators.map(|g| &eta_adjoint(g) - g).collect::<Vec<_>>(),
    );

    AlgebraReport {
        n_max: basis.n_max(),
        guarded: respect_guard,
        entries: ck.entries,
    }
}

/// max |(V^{†η}V − 1)_{rc}| over guarded r and c. Only the guarded columns
/// of `v` are read, so column-restricted exponentials are enough.
pub fn pseudo_unitarity_residual(v: &OperatorMatrix, guarded: &GuardedSubspace) -> Result<f64> {
    let product = eta_adjoint(v).try_mul(v)?;
    let identity = OperatorMatrix::identity(v.basis());
    Ok(guarded.block_residual(&product.try_combine(ONE, &identity, -ONE)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::FourVector;
    use crate::operators::{boost_exponential, weyl_displacement_guarded};

    #[test]
    fn exponentials_are_pseudo_unitary() {
        let b = TruncatedBasis::new(6);
        let g = GuardedSubspace::new(&b, 4);
        let boost = boost_exponential(&b, 2, 0.2, Some(4)).unwrap();
        assert!(pseudo_unitarity_residual(&boost, &g).unwrap() < 1e-12);
        let p = FourVector::new(0.5, -0.3, 0.2, 0.1);
        let x = FourVector::new(-0.2, 0.4, 0.0, -0.5);
        let v = weyl_displacement_guarded(&b, p, x, 4).unwrap();
        assert!(pseudo_unitarity_residual(&v, &g).unwrap() < 1e-12);
        // A plain phase rotation of one negative-norm direction is not.
        let bad = OperatorMatrix::diagonal(&b, |n| if n.0[0] == 1 { Complex64::new(2.0, 0.0) } else { ONE });
        assert_eq!(pseudo_unitarity_residual(&bad, &g).unwrap(), 3.0);
    }

    #[test]
    fn small_truncation_passes_with_guard() {
        let report = verify_algebra(&TruncatedBasis::new(4), true);
        assert!(report.max_residual() <= 1e-12, "{report:#?}");
    }

    #[test]
    fn ignoring_the_guard_exposes_truncation() {
        let report = verify_algebra(&TruncatedBasis::new(2), false);
        assert!(report.max_residual() > 1.0);
    }
}
