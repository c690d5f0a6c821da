//! Matrix norms and the entry-count pseudo-norm.

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::svd::svd_exact;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Frobenius,
    /// Largest singular value, computed to full accuracy.
    Spectral,
    /// Largest entry magnitude.
    LInf,
    /// Sum of entry magnitudes.
    L1Entrywise,
    /// Number of entries with magnitude above the threshold.
    L0Count(f64),
}

pub fn norm(a: &Matrix, kind: NormKind) -> Result<f64> {
    if a.is_empty() {
        return Err(invalid("norm: matrix must be nonempty"));
    }
    match kind {
        NormKind::Frobenius => Ok(a.frobenius_norm()),
        NormKind::Spectral => Ok(svd_exact(a)?.sigma.first().copied().unwrap_or(0.0)),
        NormKind::LInf => Ok(a.max_abs()),
        NormKind::L1Entrywise => Ok(a.sum_abs()),
        NormKind::L0Count(eps) => {
            if eps < 0.0 {
                return Err(invalid("norm: l0 threshold must be >= 0"));
            }
            Ok(a.count_above(eps) as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norms() {
        let i3 = Matrix::identity(3);
        assert!((norm(&i3, NormKind::Frobenius).unwrap() - 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((norm(&i3, NormKind::Spectral).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_of_diagonal() {
        let d = Matrix::from_diag(&[3.0, 1.0]);
        assert!((norm(&d, NormKind::Spectral).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn l0_counts_nonzeros() {
        let mut rng = crate::rng::RngStream::new(3, 0);
        let a = crate::rng::gaussian_matrix(&mut rng, 10, 10).unwrap();
        assert_eq!(norm(&a, NormKind::L0Count(0.0)).unwrap(), 100.0);
        assert!(norm(&a, NormKind::L0Count(-1.0)).is_err());
        assert!(norm(&Matrix::zeros(0, 3), NormKind::Frobenius).is_err());
    }
}
