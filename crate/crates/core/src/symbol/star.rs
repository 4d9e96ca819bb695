use num_complex::Complex64;
use serde::Serialize;

use super::{c64, partner, x_var, DiffOp, Monomial, Poly, Symbol, CI, NVARS};
use crate::error::{Error, Result};
use crate::minkowski::{normalize_representation, FourVector, MinkowskiMetric};

/// Which side a polynomial factor multiplies from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// Sign attached to ∂_i of the first factor in the bidifferential series:
/// η^{νν} for a p^ν slot, −η^{νν} for an x^ν slot.
fn slot_sign(i: usize) -> f64 {
    let s = MinkowskiMetric::sign(i % 4);
    if i < 4 {
        s
    } else {
        -s
    }
}

/// Every multi-index D with ∂^D g ≠ 0, paired with ∂^D g.
fn derivative_table(g: &Poly) -> Vec<(Monomial, Poly)> {
    let mut out = Vec::new();
    let mut stack = vec![([0u8; NVARS], g.clone(), 0usize)];
    // Enumerate D in non-decreasing slot order so each index appears once.
    while let Some((d, q, start)) = stack.pop() {
        out.push((d, q.clone()));
        for i in start..NVARS {
            let dq = q.derivative(i);
            if !dq.is_zero() {
                let mut e = d;
                e[i] += 1;
                stack.push((e, dq, i));
            }
        }
    }
    out.sort_by_key(|a| a.0);
    out
}

/// The differential operator φ ↦ G⋆φ (left) or φ ↦ φ⋆G (right) with the
/// deformation parameter `kappa` multiplying every derivative order.
///
/// Only polynomial G is accepted; the series then has finitely many terms.
pub fn star_action(g: &Symbol, side: Side, kappa: f64) -> Result<DiffOp> {
    let g = g.as_polynomial().ok_or(Error::NonPolynomialGenerator)?;
    let mut op = DiffOp::zero();
    for (d, dg) in derivative_table(&g) {
        let order: u8 = d.iter().sum();
        let mut coeff = (-CI).powu(order as u32) * kappa.powi(order as i32);
        let mut swapped = [0u8; NVARS];
        for i in 0..NVARS {
            coeff *= slot_sign(i).powi(d[i] as i32) / factorial(d[i]);
            swapped[partner(i)] = d[i];
        }
        if side == Side::Right && order % 2 == 1 {
            coeff = -coeff;
        }
        op.add_term(swapped, Symbol::from_poly(dg.scale(coeff)));
    }
    Ok(op)
}

/// G⋆φ or φ⋆G for polynomial G.
pub fn star_apply(g: &Symbol, phi: &Symbol, side: Side) -> Result<Symbol> {
    Ok(star_action(g, side, 1.0)?.apply(phi))
}

/// α⋆β when at least one factor is polynomial.
pub fn star_product(alpha: &Symbol, beta: &Symbol) -> Result<Symbol> {
    if alpha.is_polynomial() {
        star_apply(alpha, beta, Side::Left)
    } else if beta.is_polynomial() {
        star_apply(beta, alpha, Side::Right)
    } else {
        Err(Error::NonPolynomialGenerator)
    }
}

/// G̃ = G⋆ − ⋆G as a differential operator.
pub fn tilde(g: &Symbol) -> Result<DiffOp> {
    Ok(star_action(g, Side::Left, 1.0)?.sub(&star_action(g, Side::Right, 1.0)?))
}

/// {G, ρ}⋆ = (G⋆ρ − ρ⋆G)/(2i) = G̃ρ/(2i).
pub fn moyal_bracket(g: &Symbol, rho: &Symbol) -> Result<Symbol> {
    scaled_moyal_bracket(g, rho, 1.0)
}

/// (G⋆_κρ − ρ⋆_κG)/(2iκ); tends to the Poisson bracket as κ → 0.
pub fn scaled_moyal_bracket(g: &Symbol, rho: &Symbol, kappa: f64) -> Result<Symbol> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("deformation parameter {kappa}")));
    }
    let (gp, rp) = (g.is_polynomial(), rho.is_polynomial());
    let diff = if gp {
        star_action(g, Side::Left, kappa)?
            .sub(&star_action(g, Side::Right, kappa)?)
            .apply(rho)
    } else if rp {
        star_action(rho, Side::Right, kappa)?
            .sub(&star_action(rho, Side::Left, kappa)?)
            .apply(g)
    } else {
        return Err(Error::NonPolynomialGenerator);
    };
    Ok(diff.scale(Complex64::new(0.0, -0.5 / kappa)))
}

/// {α, β}_P = η^{νν}(∂_{x^ν}α ∂_{p^ν}β − ∂_{p^ν}α ∂_{x^ν}β).
pub fn poisson_bracket(alpha: &Symbol, beta: &Symbol) -> Symbol {
    (0..4).fold(Symbol::zero(), |acc, nu| {
        let (p, x) = (nu, x_var(nu));
        let t = alpha
            .derivative(x)
            .mul(&beta.derivative(p))
            .sub(&alpha.derivative(p).mul(&beta.derivative(x)));
        acc.add(&t.scale(c64(MinkowskiMetric::sign(nu))))
    })
}

/// Labels of the Lie-algebra generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GeneratorId {
    /// G_{−x^μ} = p_μ.
    MinusX(usize),
    /// G_{p^μ} = x_μ.
    P(usize),
    /// G_{ω^{μν}} = x_μp_ν − x_νp_μ, μ < ν.
    Omega(usize, usize),
    /// G_θ = 1.
    Theta,
}

impl GeneratorId {
    pub fn name(&self) -> String {
        match *self {
            GeneratorId::MinusX(mu) => format!("-x^{mu}"),
            GeneratorId::P(mu) => format!("p^{mu}"),
            GeneratorId::Omega(mu, nu) => format!("omega^{mu}{nu}"),
            GeneratorId::Theta => "theta".to_string(),
        }
    }

    /// All fifteen labels in table order.
    pub fn all() -> Vec<GeneratorId> {
        let mut ids: Vec<_> = (0..4).map(GeneratorId::MinusX).collect();
        ids.extend((0..4).map(GeneratorId::P));
        for mu in 0..4 {
            for nu in mu + 1..4 {
                ids.push(GeneratorId::Omega(mu, nu));
            }
        }
        ids.push(GeneratorId::Theta);
        ids
    }

    /// The multiplicative symbol G_s.
    pub fn symbol(&self) -> Symbol {
        match *self {
            GeneratorId::MinusX(mu) => Symbol::p_lower(mu),
            GeneratorId::P(mu) => Symbol::x_lower(mu),
            GeneratorId::Omega(mu, nu) => Symbol::x_lower(mu)
                .mul(&Symbol::p_lower(nu))
                .sub(&Symbol::x_lower(nu).mul(&Symbol::p_lower(mu))),
            GeneratorId::Theta => Symbol::one(),
        }
    }
}

/// A generator with its multiplicative symbol and its G̃ action.
#[derive(Clone, Debug)]
pub struct GeneratorEntry {
    pub id: GeneratorId,
    pub symbol: Symbol,
    pub tilde: DiffOp,
}

pub fn generator_table() -> Vec<GeneratorEntry> {
    GeneratorId::all()
        .into_iter()
        .map(|id| {
            let symbol = id.symbol();
            let tilde = tilde(&symbol).expect("generators are polynomial");
            GeneratorEntry { id, symbol, tilde }
        })
        .collect()
}

fn eta(mu: usize, nu: usize) -> f64 {
    MinkowskiMetric::component(mu, nu)
}

/// Signed generator for an ordered pair, folding ω^{νμ} = −ω^{μν}.
fn omega(mu: usize, nu: usize) -> Option<(f64, GeneratorId)> {
    match mu.cmp(&nu) {
        std::cmp::Ordering::Less => Some((1.0, GeneratorId::Omega(mu, nu))),
        std::cmp::Ordering::Greater => Some((-1.0, GeneratorId::Omega(nu, mu))),
        std::cmp::Ordering::Equal => None,
    }
}

/// Structure constants: [L_a, L_b] = Σ c·L_c for the left actions L_s = G_s⋆,
/// with L_θ the identity. Terms are merged and zero entries dropped.
pub fn structure_constants(a: GeneratorId, b: GeneratorId) -> Vec<(Complex64, GeneratorId)> {
    use GeneratorId::*;
    let two_i = 2.0 * CI;
    let mut raw: Vec<(Complex64, GeneratorId)> = Vec::new();
    let mut push = |c: f64, id: Option<(f64, GeneratorId)>| {
        if let Some((s, g)) = id {
            if c * s != 0.0 {
                raw.push((two_i * (c * s), g));
            }
        }
    };
    match (a, b) {
        (P(mu), MinusX(nu)) => push(eta(mu, nu), Some((1.0, Theta))),
        (MinusX(nu), P(mu)) => push(-eta(mu, nu), Some((1.0, Theta))),
        (Omega(mu, nu), P(r)) => {
            push(eta(mu, r), Some((1.0, P(nu))));
            push(-eta(nu, r), Some((1.0, P(mu))));
        }
        (Omega(mu, nu), MinusX(r)) => {
            push(eta(mu, r), Some((1.0, MinusX(nu))));
            push(-eta(nu, r), Some((1.0, MinusX(mu))));
        }
        (P(_) | MinusX(_), Omega(..)) => {
            return structure_constants(b, a).into_iter().map(|(c, g)| (-c, g)).collect();
        }
        (Omega(mu, nu), Omega(r, s)) => {
            push(eta(nu, s), omega(mu, r));
            push(eta(mu, r), omega(nu, s));
            push(-eta(mu, s), omega(nu, r));
            push(-eta(nu, r), omega(mu, s));
        }
        _ => {}
    }
    let mut merged: Vec<(Complex64, GeneratorId)> = Vec::new();
    for (c, g) in raw {
        match merged.iter_mut().find(|(_, h)| *h == g) {
            Some(entry) => entry.0 += c,
            None => merged.push((c, g)),
        }
    }
    merged.retain(|(c, _)| c.norm() != 0.0);
    merged.sort_by_key(|(_, g)| *g);
    merged
}

/// Largest coefficient residual of each family of generator-table identities.
#[derive(Clone, Debug, Serialize)]
pub struct TableResiduals {
    /// [G_a⋆, G_b⋆] = Σ c G_c⋆ with G_θ⋆ = 1.
    pub left_actions: f64,
    /// [G̃_a, G̃_b] = Σ c G̃_c, where G̃_θ = 0 removes the central term.
    pub tilde_actions: f64,
    /// [G_a, G̃_b] = Σ c G_c with G_θ = 1, G_a acting by multiplication.
    pub mixed: f64,
    /// [G_a, G_b] = 0 for the multiplicative symbols.
    pub multiplicative: f64,
}

impl TableResiduals {
    pub fn max(&self) -> f64 {
        self.left_actions.max(self.tilde_actions).max(self.mixed).max(self.multiplicative)
    }
}

/// Checks every pair of the generator table against [`structure_constants`].
pub fn generator_table_residuals() -> TableResiduals {
    let table = generator_table();
    let left: Vec<DiffOp> = table
        .iter()
        .map(|e| star_action(&e.symbol, Side::Left, 1.0).expect("polynomial generator"))
        .collect();
    let mult: Vec<DiffOp> = table.iter().map(|e| DiffOp::multiplication(e.symbol.clone())).collect();
    let pos = |id: GeneratorId| table.iter().position(|e| e.id == id).expect("complete table");
    let combine = |ops: &dyn Fn(usize) -> DiffOp, terms: &[(Complex64, GeneratorId)]| {
        terms.iter().fold(DiffOp::zero(), |acc, (c, g)| acc.add(&ops(pos(*g)).scale(*c)))
    };
    let mut r = TableResiduals {
        left_actions: 0.0,
        tilde_actions: 0.0,
        mixed: 0.0,
        multiplicative: 0.0,
    };
    for (i, a) in table.iter().enumerate() {
        for (j, b) in table.iter().enumerate() {
            let sc = structure_constants(a.id, b.id);
            let l = left[i].commutator(&left[j]).sub(&combine(&|k| left[k].clone(), &sc));
            let t = a.tilde.commutator(&b.tilde).sub(&combine(&|k| table[k].tilde.clone(), &sc));
            let m = mult[i].commutator(&b.tilde).sub(&combine(&|k| mult[k].clone(), &sc));
            let g = a.symbol.mul(&b.symbol).sub(&b.symbol.mul(&a.symbol));
            r.left_actions = r.left_actions.max(l.max_abs_coeff());
            r.tilde_actions = r.tilde_actions.max(t.max_abs_coeff());
            r.mixed = r.mixed.max(m.max_abs_coeff());
            r.multiplicative = r.multiplicative.max(g.max_abs_coeff());
        }
    }
    r
}

/// [α⋆, ⋆β] for polynomial α, β; vanishes identically.
pub fn left_right_commutator(alpha: &Symbol, beta: &Symbol) -> Result<DiffOp> {
    let l = star_action(alpha, Side::Left, 1.0)?;
    let r = star_action(beta, Side::Right, 1.0)?;
    Ok(l.commutator(&r))
}

/// Generators of the ς-component of the regular representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegularGenerator {
    /// ςx_μ + i∂_{p^μ}.
    Y,
    /// ςp_μ − i∂_{x^μ}.
    E,
    /// Multiplication by ς.
    I,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma == 0.0 {
        Err(Error::ZeroSigma)
    } else if !sigma.is_finite() {
        Err(Error::NonFinite("sigma"))
    } else {
        Ok(())
    }
}

/// The action of one generator on the ς-component α_ς(p, x).
pub fn regular_rep_action(sigma: f64, which: RegularGenerator, mu: usize) -> Result<DiffOp> {
    check_sigma(sigma)?;
    if mu > 3 {
        return Err(Error::InvalidAxis(mu));
    }
    let s = c64(sigma);
    Ok(match which {
        RegularGenerator::Y => DiffOp::multiplication(Symbol::x_lower(mu).scale(s)).add(&DiffOp::partial(mu, CI)),
        RegularGenerator::E => {
            DiffOp::multiplication(Symbol::p_lower(mu).scale(s)).add(&DiffOp::partial(x_var(mu), -CI))
        }
        RegularGenerator::I => DiffOp::multiplication(Symbol::constant(s)),
    })
}

/// The same action written in the normalized variables of
/// [`normalize_representation`] and divided by √|ς| (by |ς| for I).
/// The result no longer depends on |ς|: for ς > 0, Y and E become the
/// left actions of x_μ and p_μ; for ς < 0 the two are exchanged.
pub fn normalized_regular_action(sigma: f64, which: RegularGenerator, mu: usize) -> Result<DiffOp> {
    let op = regular_rep_action(sigma, which, mu)?;
    let root = sigma.abs().sqrt();
    // Column j of T is the image of the j-th unit label, read off the map
    // itself so that z = T z′ inverts (p, x) ↦ (p′, x′).
    let mut fwd = [[0.0; NVARS]; NVARS];
    for j in 0..NVARS {
        let mut p = FourVector::ZERO;
        let mut x = FourVector::ZERO;
        if j < 4 {
            p[j] = 1.0;
        } else {
            x[j - 4] = 1.0;
        }
        let (pn, xn) = normalize_representation(p, x, sigma)?;
        for i in 0..4 {
            fwd[i][j] = pn[i];
            fwd[i + 4][j] = xn[i];
        }
    }
    // The map is z′ = F z, so z = F⁻¹ z′; F is a signed scaled permutation.
    let mut t = [[0.0; NVARS]; NVARS];
    for i in 0..NVARS {
        for j in 0..NVARS {
            if fwd[i][j] != 0.0 {
                t[j][i] = 1.0 / fwd[i][j];
            }
        }
    }
    let divisor = match which {
        RegularGenerator::I => sigma.abs(),
        _ => root,
    };
    Ok(op.linear_change(&t)?.scale(c64(1.0 / divisor)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::p_var;

    fn p(mu: usize) -> Symbol {
        Symbol::p_upper(mu)
    }

    #[test]
    fn first_order_example() {
        let r = star_apply(&Symbol::x_lower(0), &p(0), Side::Left).unwrap();
        assert_eq!(r, Symbol::x_lower(0).mul(&p(0)).add(&Symbol::constant(CI)));
    }

    #[test]
    fn left_minus_right_is_derivative() {
        let phi = p(1).mul(&Symbol::x_upper(2)).mul(&p(1));
        for mu in 0..4 {
            let l = star_apply(&Symbol::x_lower(mu), &phi, Side::Left).unwrap();
            let r = star_apply(&Symbol::x_lower(mu), &phi, Side::Right).unwrap();
            assert_eq!(l.sub(&r), phi.derivative(p_var(mu)).scale(2.0 * CI));
        }
    }

    #[test]
    fn generator_left_actions() {
        // x_μ⋆ = x_μ + i∂_{p^μ}, p_μ⋆ = p_μ − i∂_{x^μ}
        for mu in 0..4 {
            let xl = star_action(&Symbol::x_lower(mu), Side::Left, 1.0).unwrap();
            let expect = DiffOp::multiplication(Symbol::x_lower(mu)).add(&DiffOp::partial(mu, CI));
            assert_eq!(xl, expect);
            let pr = star_action(&Symbol::p_lower(mu), Side::Right, 1.0).unwrap();
            let expect = DiffOp::multiplication(Symbol::p_lower(mu)).add(&DiffOp::partial(x_var(mu), CI));
            assert_eq!(pr, expect);
        }
    }

    #[test]
    fn identity_symbol_is_neutral() {
        let phi = Symbol::exp_of(&Poly::var(3).mul(&Poly::var(6)).scale(CI)).unwrap();
        assert_eq!(star_apply(&Symbol::one(), &phi, Side::Left).unwrap(), phi);
    }

    #[test]
    fn exponential_generator_rejected() {
        let e = Symbol::exp_of(&Poly::var(0)).unwrap();
        assert_eq!(star_apply(&e, &p(0), Side::Left), Err(Error::NonPolynomialGenerator));
        assert!(star_product(&e, &e).is_err());
    }

    #[test]
    fn free_hamiltonian_brackets() {
        let m = 2.0;
        let g = (0..4).fold(Symbol::zero(), |acc, mu| acc.add(&p(mu).mul(&Symbol::p_lower(mu))));
        let g = g.scale(c64(0.5 / m));
        for nu in 0..4 {
            assert!(moyal_bracket(&g, &Symbol::p_lower(nu)).unwrap().is_zero());
            let xb = moyal_bracket(&Symbol::x_lower(nu), &g).unwrap();
            assert_eq!(xb, Symbol::p_lower(nu).scale(c64(1.0 / m)));
            let bx = moyal_bracket(&g, &Symbol::x_lower(nu)).unwrap();
            assert_eq!(bx, Symbol::p_lower(nu).scale(c64(-1.0 / m)));
        }
        assert!(moyal_bracket(&g, &g).unwrap().is_zero());
    }

    #[test]
    fn tilde_of_translations() {
        for mu in 0..4 {
            assert_eq!(tilde(&Symbol::p_lower(mu)).unwrap(), DiffOp::partial(x_var(mu), -2.0 * CI));
            assert_eq!(tilde(&Symbol::x_lower(mu)).unwrap(), DiffOp::partial(mu, 2.0 * CI));
        }
        assert!(tilde(&Symbol::one()).unwrap().is_zero());
    }

    #[test]
    fn tilde_of_lorentz_pair() {
        // −2i(x_μ∂_{x^ν} − p_ν∂_{p^μ}) − (μ ↔ ν)
        let (mu, nu) = (0, 2);
        let half = |a: usize, b: usize| {
            DiffOp::partial(x_var(b), c64(1.0))
                .premultiply(&Symbol::x_lower(a))
                .sub(&DiffOp::partial(a, c64(1.0)).premultiply(&Symbol::p_lower(b)))
        };
        let expect = half(mu, nu).sub(&half(nu, mu)).scale(-2.0 * CI);
        assert_eq!(tilde(&GeneratorId::Omega(mu, nu).symbol()).unwrap(), expect);
    }

    #[test]
    fn table_has_fifteen_entries() {
        let t = generator_table();
        assert_eq!(t.len(), 15);
        assert!(t.last().unwrap().tilde.is_zero());
    }

    #[test]
    fn structure_constants_match_left_actions() {
        let table = generator_table();
        let left: Vec<DiffOp> = table
            .iter()
            .map(|e| star_action(&e.symbol, Side::Left, 1.0).unwrap())
            .collect();
        let find = |id: GeneratorId| table.iter().position(|e| e.id == id).unwrap();
        for (i, a) in table.iter().enumerate() {
            for (j, b) in table.iter().enumerate() {
                let lhs = left[i].commutator(&left[j]);
                let rhs = structure_constants(a.id, b.id)
                    .into_iter()
                    .fold(DiffOp::zero(), |acc, (c, g)| acc.add(&left[find(g)].scale(c)));
                assert_eq!(lhs, rhs, "{:?} {:?}", a.id, b.id);
            }
        }
    }

    #[test]
    fn whole_table_is_exact() {
        let r = generator_table_residuals();
        assert_eq!(r.max(), 0.0, "{r:?}");
        // The central term survives only in the mixed family.
        let mixed = DiffOp::multiplication(Symbol::x_lower(2)).commutator(&tilde(&Symbol::p_lower(2)).unwrap());
        assert_eq!(mixed, DiffOp::identity().scale(2.0 * CI));
    }

    #[test]
    fn regular_action_examples() {
        let y = regular_rep_action(1.0, RegularGenerator::Y, 1).unwrap();
        assert_eq!(y, star_action(&Symbol::x_lower(1), Side::Left, 1.0).unwrap());
        let i = regular_rep_action(-3.0, RegularGenerator::I, 0).unwrap();
        assert_eq!(i, DiffOp::multiplication(Symbol::constant(c64(-3.0))));
        assert_eq!(regular_rep_action(0.0, RegularGenerator::E, 0), Err(Error::ZeroSigma));
    }

    #[test]
    fn normalization_removes_sigma() {
        for mu in 0..4 {
            let base_y = normalized_regular_action(1.0, RegularGenerator::Y, mu).unwrap();
            let y4 = normalized_regular_action(4.0, RegularGenerator::Y, mu).unwrap();
            assert!(y4.approx_eq(&base_y, 1e-15));
            let e_neg = normalized_regular_action(-4.0, RegularGenerator::E, mu).unwrap();
            assert!(e_neg.approx_eq(&base_y, 1e-15));
            let base_e = normalized_regular_action(1.0, RegularGenerator::E, mu).unwrap();
            assert_eq!(base_e, star_action(&Symbol::p_lower(mu), Side::Left, 1.0).unwrap());
        }
    }
}
