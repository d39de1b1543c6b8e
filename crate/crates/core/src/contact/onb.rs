use nalgebra::{DMatrix, DVector};

use super::ContactError;

/// A g-orthonormal basis `(f_1, ..., f_{2n}, ξ)` at one point. Residual
/// norms are taken in this basis so they do not depend on the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    /// Basis vectors as columns, ξ last.
    pub e: DMatrix<f64>,
    e_inv: DMatrix<f64>,
}

impl OrthonormalFrame {
    /// Gram-Schmidt on `ξ, ∂_1, ..., ∂_d`, dropping nearly dependent vectors.
    pub fn new(g: &DMatrix<f64>, xi: &DVector<f64>, point: &[f64]) -> Result<Self, ContactError> {
        let d = g.nrows();
        let not_riemannian = || ContactError::NotRiemannian(point.to_vec());
        let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
        let xi_norm2 = ip(xi, xi);
        if !(xi_norm2 > 0.0) {
            return Err(not_riemannian());
        }
        let mut basis = vec![xi / xi_norm2.sqrt()];
        for k in 0..d {
            if basis.len() == d {
                break;
            }
            let mut v = DVector::zeros(d);
            v[k] = 1.0;
            // two passes keep the result orthogonal to working precision
            for _ in 0..2 {
                for b in &basis {
                    let c = ip(b, &v);
                    v -= b * c;
                }
            }
            let n2 = ip(&v, &v);
            if n2 < 0.0 {
                return Err(not_riemannian());
            }
            let scale = g[(k, k)].abs().max(f64::MIN_POSITIVE);
            if n2 > 1e-10 * scale {
                basis.push(v / n2.sqrt());
            }
        }
        if basis.len() != d {
            return Err(not_riemannian());
        }
        basis.rotate_left(1);
        let e = DMatrix::from_columns(&basis);
        let e_inv = e.transpose() * g;
        Ok(Self { e, e_inv })
    }

    pub fn dim(&self) -> usize {
        self.e.ncols()
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.e.column(i).into_owned()
    }

    /// Matrix of a (1,1) tensor in the orthonormal basis.
    pub fn op(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.e_inv * a * &self.e
    }

    pub fn op_norm(&self, a: &DMatrix<f64>) -> f64 {
        self.op(a).norm()
    }

    /// Restriction of an operator preserving the contact distribution to it.
    pub fn contact_block(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.dim() - 1;
        self.op(a).view((0, 0), (m, m)).into_owned()
    }

    pub fn vec_norm(&self, v: &DVector<f64>) -> f64 {
        (&self.e_inv * v).norm()
    }

    /// Matrix of a (0,2) tensor in the orthonormal basis.
    pub fn form(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.e.transpose() * b * &self.e
    }
}
