//! Left-invariant contact metric structures on Lie groups.
//!
//! Everything is constant in a fixed left-invariant frame `e_1..e_d`, so
//! the connection, curvature and Lie derivatives reduce to finite sums of
//! products of structure constants. No differentiation is involved.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::tensor::{Slot, TensorValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("structure constants are not antisymmetric at c^{k}_{{{i}{j}}}", k = .0 + 1, i = .1 + 1, j = .2 + 1)]
    NotAntisymmetric(usize, usize, usize),
    #[error("expected {expected} structure constants, got {got}")]
    Count { expected: usize, got: usize },
    #[error("frame data has inconsistent dimensions")]
    Dimension,
    #[error("frame metric is singular")]
    SingularMetric,
    #[error("Jacobi identity fails (residual {0:.3e})")]
    Jacobi(f64),
}

/// Outcome of [`validate_lie_algebra`].
#[derive(Debug, Clone, Serialize)]
pub struct LieAlgebraReport {
    pub jacobi_residual: f64,
    /// `(l, i, j, k)` of the worst cyclic sum, one-based.
    pub worst: Option<(usize, usize, usize, usize)>,
    pub pass: bool,
}

/// Structure constants `c^k_{ij}` with `[e_i, e_j] = c^k_{ij} e_k`, stored at `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn new(dim: usize, c: Vec<f64>) -> Result<Self, LieError> {
        if c.len() != dim * dim * dim {
            return Err(LieError::Count {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let s = Self { dim, c };
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    if s.get(k, i, j) != -s.get(k, j, i) {
                        return Err(LieError::NotAntisymmetric(k, i, j));
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            c: vec![0.0; dim * dim * dim],
        }
    }

    /// Set `[e_i, e_j] = v e_k` (and the antisymmetric partner).
    pub fn with_bracket(mut self, i: usize, j: usize, k: usize, v: f64) -> Self {
        let d = self.dim;
        self.c[(k * d + i) * d + j] = v;
        self.c[(k * d + j) * d + i] = -v;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.c[(k * d + i) * d + j]
    }

    pub fn raw(&self) -> &[f64] {
        &self.c
    }

    /// `[X, Y]` for constant-coefficient frame vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |k, _| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += self.get(k, i, j) * x[i] * y[j];
                }
            }
            s
        })
    }

    /// Matrix of `ad_X = [X, ·]`.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| (0..d).map(|i| x[i] * self.get(k, i, j)).sum())
    }
}

/// Maximum cyclic Jacobi sum `|Σ_cyc c^m_{ij} c^l_{mk}|` over all index triples.
pub fn validate_lie_algebra(c: &StructureConstants) -> LieAlgebraReport {
    let d = c.dim;
    let mut worst = 0.0;
    let mut at = None;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        s += c.get(m, i, j) * c.get(l, m, k)
                            + c.get(m, j, k) * c.get(l, m, i)
                            + c.get(m, k, i) * c.get(l, m, j);
                    }
                    if s.abs() > worst {
                        worst = s.abs();
                        at = Some((l + 1, i + 1, j + 1, k + 1));
                    }
                }
            }
        }
    }
    LieAlgebraReport {
        jacobi_residual: worst,
        worst: at,
        pass: worst < 1e-12,
    }
}

/// A left-invariant contact metric structure given by frame data.
#[derive(Debug, Clone, PartialEq)]
pub struct LieFrameModel {
    pub brackets: StructureConstants,
    /// Frame metric `g(e_a, e_b)`.
    pub g: DMatrix<f64>,
    /// `η(e_a)`.
    pub eta: DVector<f64>,
    /// Frame components of ξ.
    pub xi: DVector<f64>,
    /// `φ e_b = φ^a_b e_a`.
    pub phi: DMatrix<f64>,
}

impl LieFrameModel {
    pub fn new(
        brackets: StructureConstants,
        g: DMatrix<f64>,
        eta: DVector<f64>,
        xi: DVector<f64>,
        phi: DMatrix<f64>,
    ) -> Result<Self, LieError> {
        let d = brackets.dim();
        if g.shape() != (d, d) || phi.shape() != (d, d) || eta.len() != d || xi.len() != d {
            return Err(LieError::Dimension);
        }
        let report = validate_lie_algebra(&brackets);
        if !report.pass {
            return Err(LieError::Jacobi(report.jacobi_residual));
        }
        if g.clone().try_inverse().is_none() {
            return Err(LieError::SingularMetric);
        }
        Ok(Self {
            brackets,
            g,
            eta,
            xi,
            phi,
        })
    }

    /// Three-dimensional unimodular family `[e₁,e₂] = 2e₃`, `[e₂,e₃] = c₁e₁`,
    /// `[e₃,e₁] = c₂e₂` with orthonormal frame, `ξ = e₃`, `η = e³`,
    /// `φe₁ = e₂`, `φe₂ = −e₁`.
    pub fn lie_family(c1: f64, c2: f64) -> Self {
        let c = StructureConstants::zero(3)
            .with_bracket(0, 1, 2, 2.0)
            .with_bracket(1, 2, 0, c1)
            .with_bracket(2, 0, 1, c2);
        let mut phi = DMatrix::zeros(3, 3);
        phi[(1, 0)] = 1.0;
        phi[(0, 1)] = -1.0;
        Self {
            brackets: c,
            g: DMatrix::identity(3, 3),
            eta: DVector::from_vec(vec![0.0, 0.0, 1.0]),
            xi: DVector::from_vec(vec![0.0, 0.0, 1.0]),
            phi,
        }
    }

    pub fn dim(&self) -> usize {
        self.brackets.dim()
    }

    /// `dη(e_i, e_j) = −η([e_i, e_j])` for constant η.
    pub fn d_eta(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| -(0..d).map(|k| self.eta[k] * self.brackets.get(k, i, j)).sum::<f64>())
    }
}

/// Connection coefficients `ω^k_{ij}` with `∇_{e_i} e_j = ω^k_{ij} e_k`, stored at `[k][i][j]`.
#[derive(Debug, Clone)]
pub struct FrameConnection {
    pub dim: usize,
    pub omega: Vec<f64>,
}

impl FrameConnection {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.omega[(k * d + i) * d + j]
    }

    /// Matrix `Ω_X` with `∇_X Y = Ω_X Y` for constant `Y`.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| (0..d).map(|a| x[a] * self.get(k, a, j)).sum())
    }

    /// `∇_X T = [Ω_X, T]` for a constant (1,1) tensor.
    pub fn nabla_operator(&self, x: &DVector<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
        let o = self.along(x);
        &o * t - t * &o
    }
}

/// Levi-Civita connection from the Koszul formula with constant metric:
/// `2g(∇_i e_j, e_k) = g([e_i,e_j],e_k) − g([e_j,e_k],e_i) + g([e_k,e_i],e_j)`.
pub fn levi_civita_frame(m: &LieFrameModel) -> FrameConnection {
    let d = m.dim();
    let c = &m.brackets;
    let ginv = m.g.clone().try_inverse().expect("validated metric");
    // bl[i][j][k] = g([e_i, e_j], e_k)
    let bl = |i: usize, j: usize, k: usize| (0..d).map(|l| c.get(l, i, j) * m.g[(l, k)]).sum::<f64>();
    let mut omega = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let low: Vec<f64> = (0..d)
                .map(|k| 0.5 * (bl(i, j, k) - bl(j, k, i) + bl(k, i, j)))
                .collect();
            for k in 0..d {
                omega[(k * d + i) * d + j] = (0..d).map(|l| ginv[(k, l)] * low[l]).sum();
            }
        }
    }
    FrameConnection { dim: d, omega }
}

/// Frame curvature `R^l_{ijk}`:
/// `R(e_i,e_j)e_k = ω^m_{jk} ∇_i e_m − ω^m_{ik} ∇_j e_m − c^m_{ij} ∇_m e_k`.
pub fn curvature_frame(m: &LieFrameModel) -> TensorValue {
    let conn = levi_civita_frame(m);
    curvature_from_connection(m, &conn)
}

pub(crate) fn curvature_from_connection(m: &LieFrameModel, w: &FrameConnection) -> TensorValue {
    let d = m.dim();
    let c = &m.brackets;
    let mut r = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = 0.0;
                    for s in 0..d {
                        v += w.get(s, j, k) * w.get(l, i, s) - w.get(s, i, k) * w.get(l, j, s)
                            - c.get(s, i, j) * w.get(l, s, k);
                    }
                    r[((l * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    TensorValue::new(d, vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], r).expect("d^4")
}

/// `(L_ξ T) e_i = [ξ, T e_i] − T [ξ, e_i]` for a constant (1,1) tensor.
pub fn lie_derivative_frame(m: &LieFrameModel, t: &DMatrix<f64>) -> DMatrix<f64> {
    let ad = m.brackets.ad(&m.xi);
    &ad * t - t * &ad
}

/// Largest torsion component `∇_i e_j − ∇_j e_i − [e_i, e_j]`.
pub fn torsion_residual(m: &LieFrameModel, w: &FrameConnection) -> f64 {
    let d = m.dim();
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let t = w.get(k, i, j) - w.get(k, j, i) - m.brackets.get(k, i, j);
                worst = worst.max(t.abs());
            }
        }
    }
    worst
}

/// Largest component of `∇g`; zero for a metric connection.
pub fn metric_compatibility_residual(m: &LieFrameModel, w: &FrameConnection) -> f64 {
    let d = m.dim();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for i in 0..d {
            for j in 0..d {
                let v: f64 = (0..d)
                    .map(|s| w.get(s, a, i) * m.g[(s, j)] + w.get(s, a, j) * m.g[(i, s)])
                    .sum();
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}
