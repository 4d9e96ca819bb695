use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_finite_label, lorentz_generators, position_momentum, GuardedSubspace, OperatorMatrix, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;
use crate::minkowski::FourVector;

/// Above this dimension exponentials are formed column by column.
pub const DENSE_EXPM_LIMIT: usize = 256;

/// Norm bound for each Taylor sub-step.
const STEP_NORM: f64 = 0.5;

#[derive(Clone, Copy, Debug)]
pub struct ExpmOptions {
    /// Relative size of the last Taylor term at which the series stops.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        ExpmOptions {
            tol: 1e-14,
            max_terms: 200,
        }
    }
}

fn series_failure(residual: f64, terms: usize) -> Error {
    Error::SeriesNotConverged { residual, terms }
}

/// Scaling and squaring with a Taylor core.
pub fn expm_dense(a: &DMatrix<Complex64>, opts: ExpmOptions) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let norm = (0..a.ncols())
        .map(|c| a.column(c).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm.is_finite() {
        return Err(Error::NonFinite("matrix exponent"));
    }
    let squarings = if norm > STEP_NORM {
        (norm / STEP_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    let mut converged = false;
    let mut last = f64::INFINITY;
    for k in 1..=opts.max_terms {
        term = &term * &b / Complex64::new(k as f64, 0.0);
        sum += &term;
        last = term.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if last <= opts.tol * sum.iter().fold(0.0f64, |m, v| m.max(v.norm())) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(series_failure(last, opts.max_terms));
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// exp(A) restricted to the leading `columns` basis columns.
///
/// Each column is advanced through `s` Taylor sub-steps of exp(A/s) using
/// only sparse products, so memory stays proportional to the output.
pub fn expm_columns(a: &OperatorMatrix, columns: usize, opts: ExpmOptions) -> Result<OperatorMatrix> {
    let dim = a.dim();
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::NonFinite("matrix exponent"));
    }
    let steps = ((norm / STEP_NORM).ceil() as usize).max(1);
    let inv_steps = 1.0 / steps as f64;
    let mut triplets = Vec::new();
    for col in 0..columns.min(dim) {
        let mut v = vec![ZERO; dim];
        v[col] = ONE;
        for _ in 0..steps {
            let mut sum = v.clone();
            let mut term = v;
            let mut converged = false;
            let mut last = f64::INFINITY;
            for k in 1..=opts.max_terms {
                term = a.apply_slice(&term);
                let f = inv_steps / k as f64;
                term.iter_mut().for_each(|t| *t *= f);
                for (s, t) in sum.iter_mut().zip(&term) {
                    *s += t;
                }
                last = term.iter().fold(0.0f64, |m, t| m.max(t.norm()));
                let scale = sum.iter().fold(0.0f64, |m, s| m.max(s.norm()));
                if last <= opts.tol * scale {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(series_failure(last, opts.max_terms));
            }
            v = sum;
        }
        triplets.extend(v.into_iter().enumerate().map(|(r, x)| (r, col, x)));
    }
    let mut out = OperatorMatrix::from_triplets(a.basis(), 0, triplets);
    let measured = out.measured_level_degree();
    out = out.with_level_degree(measured);
    Ok(out)
}

fn expm_full(a: &OperatorMatrix, opts: ExpmOptions) -> Result<OperatorMatrix> {
    if a.dim() <= DENSE_EXPM_LIMIT {
        Ok(OperatorMatrix::from_dense(a.basis(), &expm_dense(&a.to_dense(), opts)?))
    } else {
        expm_columns(a, a.dim(), opts)
    }
}

/// i(p^μX̂_μ − x^μP̂_μ).
fn displacement_generator(basis: &TruncatedBasis, p: FourVector, x: FourVector) -> Result<OperatorMatrix> {
    check_finite_label(&p, "p")?;
    check_finite_label(&x, "x")?;
    let (xo, po) = position_momentum(basis);
    let mut acc = OperatorMatrix::zero(basis);
    for mu in 0..4 {
        acc = acc.try_combine(ONE, &xo[mu], I * p[mu])?;
        acc = acc.try_combine(ONE, &po[mu], -I * x[mu])?;
    }
    Ok(acc)
}

/// V(p, x) = exp(i(p^μX̂_μ − x^μP̂_μ)) on the whole truncated basis.
pub fn weyl_displacement(basis: &TruncatedBasis, p: FourVector, x: FourVector) -> Result<OperatorMatrix> {
    expm_full(&displacement_generator(basis, p, x)?, ExpmOptions::default())
}

/// Columns of V(p, x) on the guarded subspace only; the remaining columns
/// are left empty. Sufficient for every identity checked on that subspace.
pub fn weyl_displacement_guarded(
    basis: &TruncatedBasis,
    p: FourVector,
    x: FourVector,
    guard: usize,
) -> Result<OperatorMatrix> {
    let g = displacement_generator(basis, p, x)?;
    let cols = GuardedSubspace::new(basis, guard).len();
    expm_columns(&g, cols, ExpmOptions::default())
}

/// exp(−i(ω/2)Ĵ_{0i}) for a boost of rapidity ω along `axis`. With
/// `guard = Some(d)` only the guarded columns are formed.
pub fn boost_exponential(
    basis: &TruncatedBasis,
    axis: usize,
    rapidity: f64,
    guard: Option<usize>,
) -> Result<OperatorMatrix> {
    if !(1..=3).contains(&axis) {
        return Err(Error::InvalidAxis(axis));
    }
    if !rapidity.is_finite() {
        return Err(Error::NonFinite("rapidity"));
    }
    let j = lorentz_generators(basis).get(0, axis).expect("valid pair");
    let a = j.scale(-I * (rapidity / 2.0));
    match guard {
        Some(d) => expm_columns(&a, GuardedSubspace::new(basis, d).len(), ExpmOptions::default()),
        None => expm_full(&a, ExpmOptions::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::eta_adjoint;

    #[test]
    fn zero_displacement_is_identity() {
        let b = TruncatedBasis::new(3);
        let v = weyl_displacement(&b, FourVector::ZERO, FourVector::ZERO).unwrap();
        assert!(v.approx_eq(&OperatorMatrix::identity(&b), 0.0));
    }

    #[test]
    fn dense_and_column_paths_agree() {
        let b = TruncatedBasis::new(4);
        let p = FourVector::new(0.3, -0.2, 0.1, 0.4);
        let x = FourVector::new(-0.1, 0.5, 0.2, -0.3);
        let g = displacement_generator(&b, p, x).unwrap();
        let dense = OperatorMatrix::from_dense(&b, &expm_dense(&g.to_dense(), ExpmOptions::default()).unwrap());
        let cols = expm_columns(&g, b.len(), ExpmOptions::default()).unwrap();
        assert!(dense.approx_eq(&cols, 1e-12));
    }

    #[test]
    fn dense_exponential_of_rotation_generator() {
        let theta = 2.5;
        let a = DMatrix::from_row_slice(2, 2, &[ZERO, -ONE * theta, ONE * theta, ZERO]);
        let e = expm_dense(&a, ExpmOptions::default()).unwrap();
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn truncated_displacement_is_exactly_eta_unitary() {
        let b = TruncatedBasis::new(5);
        let v = weyl_displacement(&b, FourVector::new(0.2, 0.1, 0.0, -0.3), FourVector::new(0.4, 0.0, 0.2, 0.1)).unwrap();
        let prod = &eta_adjoint(&v) * &v;
        assert!(prod.approx_eq(&OperatorMatrix::identity(&b), 1e-12));
    }

    #[test]
    fn boost_rejects_time_axis() {
        let b = TruncatedBasis::new(1);
        assert!(boost_exponential(&b, 0, 0.1, None).is_err());
    }
}
