use nalgebra::{DMatrix, DVector};

use super::TensorError;

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub coefficients: DVector<f64>,
    pub residual_norm: f64,
    pub rank: usize,
    /// Set when the design matrix lacks full column rank; the returned
    /// coefficients are then the minimum-norm minimizer.
    pub rank_deficient: bool,
}

/// Minimize `|A x - b|_2`, returning the minimum-norm solution when `A` is rank deficient.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LstsqSolution, TensorError> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(TensorError::EmptySystem);
    }
    if b.len() != m {
        return Err(TensorError::Dimension(b.len(), m));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = (m.max(n) as f64) * f64::EPSILON * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    let coefficients = if rank == 0 {
        DVector::zeros(n)
    } else {
        svd.solve(b, cutoff).expect("u and v were computed")
    };
    let residual_norm = (a * &coefficients - b).norm();
    Ok(LstsqSolution {
        coefficients,
        residual_norm,
        rank,
        rank_deficient: rank < n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let s = lstsq(&DMatrix::identity(2, 2), &DVector::from_vec(vec![3.0, 7.0])).unwrap();
        assert_eq!(s.coefficients.as_slice(), &[3.0, 7.0]);
        assert_eq!(s.residual_norm, 0.0);
        assert!(!s.rank_deficient);
    }

    #[test]
    fn zero_column_gives_min_norm() {
        // second column identically zero (the h = 0 case)
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 2.0, 0.0]);
        let s = lstsq(&a, &b).unwrap();
        assert!(s.rank_deficient);
        assert_eq!(s.rank, 1);
        assert!((s.coefficients[0] - 2.0).abs() < 1e-14);
        assert_eq!(s.coefficients[1], 0.0);
    }

    #[test]
    fn empty_system() {
        let a = DMatrix::<f64>::zeros(0, 2);
        assert_eq!(lstsq(&a, &DVector::zeros(0)).unwrap_err(), TensorError::EmptySystem);
    }
}
