//! Phase-space wavefunctions of Fock states and numerical evaluation of the
//! indefinite integral inner product, plus the flat-measure divergence demo.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Mutex;

use gauss_quad::{GaussHermite, GaussLegendre};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockIndex, TruncatedBasis};
use crate::minkowski::MinkowskiMetric;
use crate::operators::OperatorMatrix;
use crate::symbol::{p_var, star_action, x_var, DiffOp, Monomial, Poly, Side, Symbol, NVARS};

/// Gauss–Hermite nodes per axis used unless configured otherwise.
pub const DEFAULT_NODES: usize = 48;

/// Upper node count for the full 8D tensor grid.
pub const TENSOR_NODE_CAP: usize = 12;

/// Cutoffs R of the nested hypercubes [−R, R]⁸ in the flat-measure demo.
pub const UNITARY_CUTOFFS: [f64; 4] = [2.0, 4.0, 6.0, 8.0];

/// Growth factor between consecutive cutoffs that signals divergence.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// φ₀ = e^{−(x·x + p·p)/2} with Minkowski squares.
pub fn vacuum_wavefunction() -> Symbol {
    let mut q = Poly::zero();
    for mu in 0..4 {
        let c = Complex64::new(-0.5 * MinkowskiMetric::sign(mu), 0.0);
        q = q.add(&Poly::var(p_var(mu)).pow(2).scale(c));
        q = q.add(&Poly::var(x_var(mu)).pow(2).scale(c));
    }
    Symbol::exp_of(&q).expect("quadratic exponent")
}

/// Left action of the η-creation operator, x_μ⋆ − i p_μ⋆.
pub fn creation_action(mu: usize) -> DiffOp {
    let g = Symbol::x_lower(mu).sub(&Symbol::p_lower(mu).scale(Complex64::new(0.0, 1.0)));
    star_action(&g, Side::Left, 1.0).expect("polynomial generator")
}

/// Left action of the lowered annihilation operator, x_μ⋆ + i p_μ⋆.
pub fn annihilation_action(mu: usize) -> DiffOp {
    let g = Symbol::x_lower(mu).add(&Symbol::p_lower(mu).scale(Complex64::new(0.0, 1.0)));
    star_action(&g, Side::Left, 1.0).expect("polynomial generator")
}

/// φ_n = Π_μ (creation_μ)^{n_μ} φ₀ / (2^{|n|} √Π n_μ!).
pub fn fock_wavefunction(n: FockIndex) -> Symbol {
    let mut phi = vacuum_wavefunction();
    let mut norm = 1.0;
    for mu in 0..4 {
        let up = creation_action(mu);
        for k in 1..=n.0[mu] {
            phi = up.apply(&phi);
            norm *= 2.0 * (k as f64).sqrt();
        }
    }
    phi.scale(Complex64::new(1.0 / norm, 0.0))
}

/// One-dimensional rule. For Gauss–Hermite rules the weights already
/// contain e^{−t²}, which is divided back out of the integrand.
#[derive(Clone, Debug)]
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    hermite: bool,
}

impl Rule {
    fn hermite(n: usize) -> Rule {
        let gh = GaussHermite::new(NonZeroUsize::new(n).expect("positive node count"));
        let (nodes, weights) = gh.as_node_weight_pairs().iter().copied().unzip();
        Rule {
            nodes,
            weights,
            hermite: true,
        }
    }

    fn legendre(n: usize, half_width: f64) -> Rule {
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("positive node count"));
        let (nodes, weights) = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(t, w)| (t * half_width, w * half_width))
            .unzip();
        Rule {
            nodes,
            weights,
            hermite: false,
        }
    }

    fn log_correction(&self, t: f64) -> f64 {
        if self.hermite {
            t * t
        } else {
            0.0
        }
    }
}

type ExponentKey = (usize, Vec<(Monomial, u64, u64)>);

/// Per-(μ, exponent) grid of integrand values with its computed moments.
struct MomentTable {
    values: Vec<Complex64>,
    moments: HashMap<(u8, u8), Complex64>,
}

/// Gauss–Hermite grid with a cache of two-dimensional moments.
pub struct QuadratureGrid {
    rule: Rule,
    cache: Mutex<HashMap<ExponentKey, MomentTable>>,
}

impl Clone for QuadratureGrid {
    fn clone(&self) -> Self {
        QuadratureGrid::from_rule(self.rule.clone())
    }
}

impl std::fmt::Debug for QuadratureGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadratureGrid").field("nodes", &self.nodes()).finish()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid::new(DEFAULT_NODES).expect("default node count")
    }
}

impl QuadratureGrid {
    pub fn new(nodes: usize) -> Result<Self> {
        if !(1..=200).contains(&nodes) {
            return Err(Error::InvalidParameter(format!("quadrature nodes per axis must be in 1..=200, got {nodes}")));
        }
        Ok(Self::from_rule(Rule::hermite(nodes)))
    }

    fn from_rule(rule: Rule) -> Self {
        QuadratureGrid {
            rule,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn nodes(&self) -> usize {
        self.rule.nodes.len()
    }

    /// Node/weight pairs of the underlying rule (weight e^{−t²} for the
    /// Hermite grid).
    pub fn node_weight_pairs(&self) -> Vec<(f64, f64)> {
        self.rule.nodes.iter().copied().zip(self.rule.weights.iter().copied()).collect()
    }
}

fn exponent_key(mu: usize, e: &Poly) -> ExponentKey {
    (mu, e.terms().map(|(m, c)| (*m, c.re.to_bits(), c.im.to_bits())).collect())
}

/// Splits an exponent into the parts touching only (p^μ, x^μ).
fn split_exponent(e: &Poly) -> Option<[Poly; 4]> {
    let mut parts: [Poly; 4] = Default::default();
    for (m, c) in e.terms() {
        let comps: Vec<usize> = (0..NVARS).filter(|&i| m[i] > 0).map(|i| i % 4).collect();
        if comps.windows(2).any(|w| w[0] != w[1]) {
            return None;
        }
        let mu = comps.first().copied().unwrap_or(0);
        parts[mu].add_term(*m, *c);
    }
    Some(parts)
}

/// (1/π)∫∫ e^{E(u,v) − 2δ(u²+v²)} u^a v^b du dv on the rule, with the
/// damping term present when `damped`.
fn moment(
    rule: &Rule,
    cache: &Mutex<HashMap<ExponentKey, MomentTable>>,
    mu: usize,
    e: &Poly,
    damped: bool,
    a: u8,
    b: u8,
) -> Result<Complex64> {
    let key = exponent_key(mu + if damped { 0 } else { 4 }, e);
    let mut cache = cache.lock().expect("moment cache poisoned");
    let table = match cache.entry(key) {
        std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
        std::collections::hash_map::Entry::Vacant(v) => {
            let n = rule.nodes.len();
            let mut values = Vec::with_capacity(n * n);
            let mut z = [Complex64::new(0.0, 0.0); NVARS];
            for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
                for (&v, &wv) in rule.nodes.iter().zip(&rule.weights) {
                    z[p_var(mu)] = Complex64::new(u, 0.0);
                    z[x_var(mu)] = Complex64::new(v, 0.0);
                    let damping = if damped && mu == 0 { -2.0 * (u * u + v * v) } else { 0.0 };
                    let log = e.evaluate(&z) + rule.log_correction(u) + rule.log_correction(v) + damping;
                    let val = log.exp() * (wu * wv / PI);
                    if !val.is_finite() {
                        return Err(Error::IntegrandOverflow);
                    }
                    values.push(val);
                }
            }
            v.insert(MomentTable {
                values,
                moments: HashMap::new(),
            })
        }
    };
    if let Some(m) = table.moments.get(&(a, b)) {
        return Ok(*m);
    }
    let n = rule.nodes.len();
    let mut acc = ZERO;
    for (i, &u) in rule.nodes.iter().enumerate() {
        let ua = u.powi(a as i32);
        let row = &table.values[i * n..(i + 1) * n];
        let inner: Complex64 = row
            .iter()
            .zip(&rule.nodes)
            .map(|(val, &v)| val * v.powi(b as i32))
            .sum();
        acc += inner * ua;
    }
    table.moments.insert((a, b), acc);
    Ok(acc)
}

fn factorized_integral(
    product: &Symbol,
    rule: &Rule,
    cache: &Mutex<HashMap<ExponentKey, MomentTable>>,
    damped: bool,
) -> Result<Option<Complex64>> {
    let mut total = ZERO;
    for (e, p) in product.groups() {
        let Some(parts) = split_exponent(e) else {
            return Ok(None);
        };
        for (m, c) in p.terms() {
            let mut term = *c;
            for (mu, part) in parts.iter().enumerate() {
                term *= moment(rule, cache, mu, part, damped, m[p_var(mu)], m[x_var(mu)])?;
            }
            total += term;
        }
    }
    Ok(Some(total))
}

fn tensor_integral(product: &Symbol, rule: &Rule, damped: bool) -> Result<Complex64> {
    let n = rule.nodes.len();
    let points = n.pow(NVARS as u32);
    let mut idx = [0usize; NVARS];
    let mut total = ZERO;
    for _ in 0..points {
        let mut z = [ZERO; NVARS];
        let mut log_w = 0.0;
        let mut w = 1.0 / PI.powi(4);
        for i in 0..NVARS {
            let t = rule.nodes[idx[i]];
            z[i] = Complex64::new(t, 0.0);
            w *= rule.weights[idx[i]];
            log_w += rule.log_correction(t);
        }
        if damped {
            log_w -= 2.0 * (z[p_var(0)].re.powi(2) + z[x_var(0)].re.powi(2));
        }
        let val = product
            .groups()
            .iter()
            .map(|(e, p)| p.evaluate(&z) * (e.evaluate(&z) + log_w).exp())
            .sum::<Complex64>()
            * w;
        if !val.is_finite() {
            return Err(Error::IntegrandOverflow);
        }
        total += val;
        for i in 0..NVARS {
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(total)
}

/// conj(ψ)(p^i, x^i, −p⁰, −x⁰)·φ(p, x).
fn krein_integrand(psi: &Symbol, phi: &Symbol) -> Symbol {
    let mut flip = [1.0; NVARS];
    flip[p_var(0)] = -1.0;
    flip[x_var(0)] = -1.0;
    psi.conj().scale_variables(&flip).mul(phi)
}

/// The indefinite integral inner product
/// (1/π⁴)∫ conj(ψ)(p^i, x^i, −p⁰, −x⁰) φ(p, x) e^{−2((x⁰)² + (p⁰)²)} d⁸z.
///
/// Integrands whose exponents do not couple different μ are evaluated as
/// sums of products of 2D Gauss–Hermite moments; anything else falls back
/// to the full 8D tensor grid with at most [`TENSOR_NODE_CAP`] nodes per axis.
pub fn krein_integral_inner(psi: &Symbol, phi: &Symbol, grid: &QuadratureGrid) -> Result<Complex64> {
    let product = krein_integrand(psi, phi);
    if let Some(v) = factorized_integral(&product, &grid.rule, &grid.cache, true)? {
        return Ok(v);
    }
    let nodes = grid.nodes().min(TENSOR_NODE_CAP);
    log::warn!(
        "non-factorizable integrand: 8D tensor grid with {nodes} nodes per axis ({} points)",
        nodes.pow(NVARS as u32)
    );
    let rule = if nodes == grid.nodes() { grid.rule.clone() } else { Rule::hermite(nodes) };
    tensor_integral(&product, &rule, true)
}

/// The same inner product forced through the 8D tensor grid.
pub fn krein_integral_inner_tensor(psi: &Symbol, phi: &Symbol, grid: &QuadratureGrid) -> Result<Complex64> {
    if grid.nodes() > TENSOR_NODE_CAP {
        return Err(Error::InvalidParameter(format!(
            "tensor grid limited to {TENSOR_NODE_CAP} nodes per axis"
        )));
    }
    tensor_integral(&krein_integrand(psi, phi), &grid.rule, true)
}

/// Table of krein_integral_inner(φ_m, φ_n) over a truncated basis.
pub fn krein_inner_table(basis: &TruncatedBasis, grid: &QuadratureGrid) -> Result<Vec<Vec<Complex64>>> {
    let phis: Vec<Symbol> = basis.indices().iter().map(|n| fock_wavefunction(*n)).collect();
    phis.iter()
        .map(|psi| phis.iter().map(|phi| krein_integral_inner(psi, phi, grid)).collect())
        .collect()
}

/// Matrix of a differential action in the Fock-wavefunction basis,
/// A_{mn} = (−1)^{m₀}⟨φ_m, Aφ_n⟩ by quadrature.
pub fn action_matrix(action: &DiffOp, basis: &TruncatedBasis, grid: &QuadratureGrid) -> Result<OperatorMatrix> {
    let phis: Vec<Symbol> = basis.indices().iter().map(|n| fock_wavefunction(*n)).collect();
    let mut triplets = Vec::new();
    for (c, phi) in phis.iter().enumerate() {
        let image = action.apply(phi);
        for (r, psi) in phis.iter().enumerate() {
            let sign = basis.index(r).krein_sign() as f64;
            triplets.push((r, c, krein_integral_inner(psi, &image, grid)? * sign));
        }
    }
    Ok(OperatorMatrix::from_triplets(basis, 0, triplets))
}

/// ln|φ(z)|², computed without forming e^{E} so large exponents stay finite.
pub fn log_density(phi: &Symbol, z: &[f64; NVARS]) -> f64 {
    let zc = z.map(|v| Complex64::new(v, 0.0));
    let logs: Vec<(Complex64, Complex64)> = phi
        .groups()
        .iter()
        .map(|(e, p)| (e.evaluate(&zc), p.evaluate(&zc)))
        .collect();
    let shift = logs.iter().fold(f64::NEG_INFINITY, |m, (e, _)| m.max(e.re));
    let sum: Complex64 = logs.iter().map(|(e, p)| p * (e - shift).exp()).sum();
    sum.norm_sqr().ln() + 2.0 * shift
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum UnitaryVerdict {
    Finite { value: Complex64 },
    Divergent { cutoff: f64, growth: f64 },
}

/// Partial flat-measure integrals over nested hypercubes.
#[derive(Clone, Debug, Serialize)]
pub struct UnitaryReport {
    pub cutoffs: Vec<f64>,
    pub partials: Vec<Complex64>,
    /// |partial_{k+1}| / |partial_k|.
    pub growth: Vec<f64>,
    pub verdict: UnitaryVerdict,
}

impl UnitaryReport {
    /// The integral when it converged, otherwise the divergence error.
    pub fn value(&self) -> Result<Complex64> {
        match self.verdict {
            UnitaryVerdict::Finite { value } => Ok(value),
            UnitaryVerdict::Divergent { cutoff, growth } => Err(Error::Divergent { cutoff, growth }),
        }
    }
}

/// Attempts (1/π⁴)∫ conj(ψ) φ d⁸z with the flat measure, as partial
/// integrals over [−R, R]⁸ for R in [`UNITARY_CUTOFFS`] using Gauss–Legendre
/// rules with the grid's node count (at least 32). Consecutive growth above
/// [`DIVERGENCE_GROWTH`] gives a divergent verdict.
pub fn unitary_integral_inner(psi: &Symbol, phi: &Symbol, grid: &QuadratureGrid) -> Result<UnitaryReport> {
    let product = psi.conj().mul(phi);
    let nodes = grid.nodes().max(32);
    let mut partials = Vec::with_capacity(UNITARY_CUTOFFS.len());
    for &r in &UNITARY_CUTOFFS {
        let rule = Rule::legendre(nodes, r);
        let cache = Mutex::new(HashMap::new());
        let v = match factorized_integral(&product, &rule, &cache, false)? {
            Some(v) => v,
            None => {
                let rule = Rule::legendre(nodes.min(TENSOR_NODE_CAP), r);
                log::warn!("non-factorizable flat-measure integrand: using 8D tensor grid");
                tensor_integral(&product, &rule, false)?
            }
        };
        partials.push(v);
    }
    let growth: Vec<f64> = partials.windows(2).map(|w| w[1].norm() / w[0].norm()).collect();
    let verdict = match growth.iter().position(|&g| g > DIVERGENCE_GROWTH || !g.is_finite()) {
        Some(k) => UnitaryVerdict::Divergent {
            cutoff: UNITARY_CUTOFFS[k + 1],
            growth: growth[k],
        },
        None => UnitaryVerdict::Finite {
            value: *partials.last().expect("nonempty cutoffs"),
        },
    };
    Ok(UnitaryReport {
        cutoffs: UNITARY_CUTOFFS.to_vec(),
        partials,
        growth,
        verdict,
    })
}

fn rho_integrand(rho: f64) -> f64 {
    let d = 1.0 - rho * rho;
    1.0 / (d * d)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// I(ρ_c) = ∫_{−ρ_c}^{ρ_c} dρ/(1 − ρ²)² by adaptive Simpson quadrature.
pub fn rho_integral_demo(rho_cut: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho_cut) {
        return Err(Error::RhoCutOutOfRange(rho_cut));
    }
    if rho_cut == 0.0 {
        return Ok(0.0);
    }
    // Even integrand: integrate [0, ρ_c] and double. Breakpoints at
    // 1 − 10^{−j} keep the integrand within a factor ~100 on each piece.
    let mut cuts = vec![0.0];
    let mut j = 1;
    while 1.0 - 10f64.powi(-j) < rho_cut {
        cuts.push(1.0 - 10f64.powi(-j));
        j += 1;
    }
    cuts.push(rho_cut);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fm, fb) = (rho_integrand(a), rho_integrand(0.5 * (a + b)), rho_integrand(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(&rho_integrand, a, b, fa, fm, fb, whole, 1e-13 * whole.abs(), 50);
    }
    Ok(2.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_excited_wavefunction() {
        let phi = fock_wavefunction(FockIndex::new(0, 1, 0, 0));
        let factor = Poly::var(x_var(1)).sub(&Poly::var(p_var(1)).scale(Complex64::new(0.0, 1.0)));
        let expect = vacuum_wavefunction().mul_poly(&factor);
        assert!(phi.approx_eq(&expect, 1e-15));
        assert_eq!(fock_wavefunction(FockIndex::VACUUM), vacuum_wavefunction());
    }

    #[test]
    fn vacuum_is_annihilated() {
        for mu in 0..4 {
            assert!(annihilation_action(mu).apply(&vacuum_wavefunction()).is_zero());
        }
    }

    #[test]
    fn low_norms() {
        let grid = QuadratureGrid::new(40).unwrap();
        let vac = vacuum_wavefunction();
        assert!((krein_integral_inner(&vac, &vac, &grid).unwrap() - c(1.0)).norm() < 1e-10);
        let t = fock_wavefunction(FockIndex::new(1, 0, 0, 0));
        assert!((krein_integral_inner(&t, &t, &grid).unwrap() + c(1.0)).norm() < 1e-8);
        let a = fock_wavefunction(FockIndex::new(0, 1, 0, 0));
        let b = fock_wavefunction(FockIndex::new(0, 0, 1, 0));
        assert!(krein_integral_inner(&a, &b, &grid).unwrap().norm() < 1e-10);
    }

    #[test]
    fn rho_integral_values() {
        assert_eq!(rho_integral_demo(0.0).unwrap(), 0.0);
        let exact = 0.9 / (1.0 - 0.81) + 0.9f64.atanh();
        assert!((rho_integral_demo(0.9).unwrap() - exact).abs() < 1e-9);
        assert!(matches!(rho_integral_demo(1.0), Err(Error::RhoCutOutOfRange(_))));
    }

    #[test]
    fn log_density_of_vacuum_in_time_direction() {
        let mut z = [0.0; NVARS];
        z[x_var(0)] = 30.0;
        assert!((log_density(&vacuum_wavefunction(), &z) - 900.0).abs() < 1e-9);
    }
}
