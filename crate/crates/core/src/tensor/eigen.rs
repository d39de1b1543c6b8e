use nalgebra::{DMatrix, DVector};

use super::{LinearOperator, TensorError};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of an operator that is self-adjoint w.r.t. a metric.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are g-orthonormal eigenvectors, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }
}

/// Solve `A v = λ v` for `A` self-adjoint w.r.t. the SPD metric `g`.
///
/// The operator is conjugated into a g-orthonormal basis via the Cholesky
/// factor of `g` and diagonalized by cyclic Jacobi rotations (row-major
/// pivot order, so results are reproducible bit for bit).
pub fn sym_eigen(a: &LinearOperator, g: &DMatrix<f64>, tol: f64) -> Result<SymEigen, TensorError> {
    let m = &a.matrix;
    let d = m.nrows();
    if g.nrows() != d {
        return Err(TensorError::Dimension(g.nrows(), d));
    }
    let ga = g * m;
    let skew = (&ga - ga.transpose()).amax();
    let scale = ga.amax().max(1.0);
    if skew > tol * scale {
        return Err(TensorError::NotSelfAdjoint(skew));
    }
    let chol = g.clone().cholesky().ok_or(TensorError::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv_t = l
        .clone()
        .try_inverse()
        .ok_or(TensorError::SingularMetric)?
        .transpose();
    let mut b = l.transpose() * m * &l_inv_t;
    b = (&b + b.transpose()) * 0.5;

    let (vals, w) = jacobi(b);
    let v = l_inv_t * w;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let values = order.iter().map(|&i| vals[i]).collect();
    let mut vectors = DMatrix::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        let mut c = v.column(i).into_owned();
        // sign convention: largest-magnitude entry positive
        let (imax, _) = c.iter().enumerate().fold((0, 0.0), |(bi, bv), (k, x)| {
            if x.abs() > bv + 1e-12 {
                (k, x.abs())
            } else {
                (bi, bv)
            }
        });
        if c[imax] < 0.0 {
            c = -c;
        }
        vectors.set_column(col, &c);
    }
    Ok(SymEigen { values, vectors })
}

/// Cyclic Jacobi on a symmetric matrix; returns (eigenvalues, orthonormal eigenvectors as columns).
fn jacobi(mut b: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let d = b.nrows();
    let mut v = DMatrix::identity(d, d);
    let scale = b.amax().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += b[(p, q)] * b[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let bpq = b[(p, q)];
                if bpq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * bpq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (bkp, bkq) = (b[(k, p)], b[(k, q)]);
                    b[(k, p)] = c * bkp - s * bkq;
                    b[(k, q)] = s * bkp + c * bkq;
                }
                for k in 0..d {
                    let (bpk, bqk) = (b[(p, k)], b[(q, k)]);
                    b[(p, k)] = c * bpk - s * bqk;
                    b[(q, k)] = s * bpk + c * bqk;
                }
                for k in 0..d {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| b[(i, i)]).collect(), v)
}
