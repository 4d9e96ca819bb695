use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

use super::{GuardedSubspace, OperatorMatrix};
use crate::error::{Error, Result};

/// Eigenvalues of one total-level block.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSpectrum {
    pub level: usize,
    pub eigenvalues: Vec<Complex64>,
}

/// Eigenvalues from a general complex Schur decomposition, sorted by real
/// then imaginary part. Reality is never assumed.
pub fn spectrum_dense(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entry"));
    }
    let mut eig: Vec<Complex64> = Schur::new(m)
        .eigenvalues()
        .ok_or_else(|| Error::InvalidParameter("Schur decomposition did not converge".into()))?
        .iter()
        .copied()
        .collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Spectrum of the block of `op` on the guarded subspace.
pub fn guarded_spectrum(op: &OperatorMatrix, guarded: &GuardedSubspace) -> Result<Vec<Complex64>> {
    spectrum_dense(op.dense_block(guarded.len()))
}

/// Spectra of the diagonal level blocks at guarded levels. Meaningful for
/// operators that preserve the total level.
pub fn level_block_spectra(op: &OperatorMatrix, guarded: &GuardedSubspace) -> Result<Vec<LevelSpectrum>> {
    let Some(top) = guarded.top_level() else {
        return Ok(Vec::new());
    };
    let basis = op.basis();
    (0..=top)
        .map(|level| {
            let start = if level == 0 { 0 } else { basis.prefix_len(level - 1) };
            let end = basis.prefix_len(level);
            let block = DMatrix::from_fn(end - start, end - start, |r, c| op.get(start + r, start + c));
            Ok(LevelSpectrum {
                level,
                eigenvalues: spectrum_dense(block)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TruncatedBasis;
    use crate::operators::number_ops;

    #[test]
    fn number_operator_spectrum() {
        let b = TruncatedBasis::new(4);
        let (_, n) = number_ops(&b);
        let levels = level_block_spectra(&n, &GuardedSubspace::unguarded(&b)).unwrap();
        for ls in levels {
            assert_eq!(ls.eigenvalues.len(), crate::fock::level_size(ls.level));
            assert!(ls.eigenvalues.iter().all(|e| (e.re - ls.level as f64).abs() < 1e-12 && e.im.abs() < 1e-12));
        }
    }

    #[test]
    fn complex_pair_is_reported() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        let e = spectrum_dense(m).unwrap();
        assert!((e[0].im + 1.0).abs() < 1e-12 && (e[1].im - 1.0).abs() < 1e-12);
    }
}
