use nalgebra::{DMatrix, DVector};

use super::{Backend, ContactError, ContactMetricStructure, OrthonormalFrame};
use crate::chart::jets::{
    connection_jets, exterior_derivative_jets, lie_derivative_11_jets, nabla_metric, nabla_operator,
    nabla_vector, riemann_from_connection,
};
use crate::chart::Point;
use crate::expr::Jet;
use crate::homogeneous::{curvature_from_connection, levi_civita_frame, lie_derivative_frame, metric_compatibility_residual};
use crate::report::{Check, VerificationReport};
use crate::tensor::{Slot, TensorValue};

/// Everything derived from `(η, ξ, φ, g)` at one point, in the backend's
/// basis (coordinate vectors for charts, the Lie frame otherwise).
#[derive(Debug, Clone)]
pub struct DerivedTensors {
    pub point: Vec<f64>,
    pub eta: DVector<f64>,
    pub xi: DVector<f64>,
    pub phi: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub d_eta: DMatrix<f64>,
    /// `h = ½ L_ξ φ`.
    pub h: DMatrix<f64>,
    /// Jacobi operator `l = R(·, ξ)ξ`.
    pub l: DMatrix<f64>,
    pub nabla_xi_h: DMatrix<f64>,
    pub lie_xi_h: DMatrix<f64>,
    /// `R^l_{ijk}`, `R(e_i, e_j)e_k = R^l_{ijk} e_l`.
    pub riemann: TensorValue,
    /// `Γ^k_{ij}` (or frame `ω^k_{ij}`) at `[k][i][j]`.
    pub connection: Vec<f64>,
    /// `∇_{e_a} φ` for each basis vector.
    pub nabla_phi: Vec<DMatrix<f64>>,
    /// Column `a` holds `∇_{e_a} ξ`.
    pub nabla_xi: DMatrix<f64>,
    /// Largest component of `∇g`.
    pub metric_residual: f64,
    pub frame: OrthonormalFrame,
}

impl DerivedTensors {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `R(X, Y)Z`.
    pub fn curvature(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let r = self.riemann.components();
        let mut out = DVector::zeros(d);
        for l in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    if y[j] == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        s += r[((l * d + i) * d + j) * d + k] * x[i] * y[j] * z[k];
                    }
                }
            }
            out[l] = s;
        }
        out
    }

    pub fn nabla_phi_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (a, np) in self.nabla_phi.iter().enumerate() {
            out += np * x[a];
        }
        out
    }

    /// `I − η ⊗ ξ`, the projection onto the contact distribution.
    pub fn projector(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::identity(d, d) - &self.xi * self.eta.transpose()
    }

    /// Algebraic facts every contact metric structure satisfies.
    pub fn invariants(&self, tol: f64) -> VerificationReport {
        let f = &self.frame;
        let p = &self.point;
        let asym = |a: &DMatrix<f64>| {
            let m = f.op(a);
            (&m - m.transpose()).norm()
        };
        let mut r = VerificationReport::new("derived tensor invariants");
        r.push(Check::upper("h self-adjoint", asym(&self.h), tol, p));
        r.push(Check::upper("h anticommutes with phi", f.op_norm(&(&self.h * &self.phi + &self.phi * &self.h)), tol, p));
        r.push(Check::upper("h xi = 0", f.vec_norm(&(&self.h * &self.xi)), tol, p));
        r.push(Check::upper("trace h = 0", self.h.trace().abs(), tol, p));
        r.push(Check::upper("l self-adjoint", asym(&self.l), tol, p));
        r.push(Check::upper("l xi = 0", f.vec_norm(&(&self.l * &self.xi)), tol, p));
        r.push(Check::upper("metric connection", self.metric_residual, tol, p));
        r
    }
}

fn jacobi_operator(r: &[f64], xi: &DVector<f64>) -> DMatrix<f64> {
    let d = xi.len();
    DMatrix::from_fn(d, d, |i, j| {
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                s += r[((i * d + j) * d + a) * d + b] * xi[a] * xi[b];
            }
        }
        s
    })
}

fn values(js: &[Jet]) -> Vec<f64> {
    js.iter().map(Jet::value).collect()
}

fn operator_at(v: &[f64], k: usize, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| v[(k * d + i) * d + j])
}

/// Derived tensors at `p` (ignored for frame structures).
pub fn derived_tensors(s: &ContactMetricStructure, p: &Point) -> Result<DerivedTensors, ContactError> {
    s.check_point(p)?;
    let d = s.dim();
    let rslots = vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down];
    let out = match &s.backend {
        Backend::Chart(c) => {
            let eta_j = c.eta.eval(p, 1)?;
            let xi_j = c.xi.eval(p, 2)?;
            let phi_j = c.phi.eval(p, 2)?;
            let g_j = c.g.eval(p, 2)?;
            let gamma_j = connection_jets(&g_j.comps, d)?;
            let gamma = values(&gamma_j);
            let r = riemann_from_connection(&gamma_j, d);
            let h_j: Vec<Jet> = lie_derivative_11_jets(&phi_j.comps, &xi_j.comps, d)
                .iter()
                .map(|j| j.scale(0.5))
                .collect();
            let lie_xi_h = lie_derivative_11_jets(&h_j, &xi_j.comps, d);
            let xi = DVector::from_vec(xi_j.values());
            let nh = nabla_operator(&h_j, &gamma, d);
            let mut nabla_xi_h = DMatrix::zeros(d, d);
            for k in 0..d {
                nabla_xi_h += operator_at(&nh, k, d) * xi[k];
            }
            let nphi = nabla_operator(&phi_j.comps, &gamma, d);
            let nxi = nabla_vector(&xi_j.comps, &gamma, d);
            let ng = nabla_metric(&g_j.comps, &gamma, d);
            let g = DMatrix::from_row_slice(d, d, &g_j.values());
            let frame = OrthonormalFrame::new(&g, &xi, p)?;
            DerivedTensors {
                point: p.to_vec(),
                eta: DVector::from_vec(eta_j.values()),
                phi: DMatrix::from_row_slice(d, d, &phi_j.values()),
                d_eta: DMatrix::from_row_slice(d, d, &values(&exterior_derivative_jets(&eta_j.comps, d))),
                h: DMatrix::from_row_slice(d, d, &values(&h_j)),
                l: jacobi_operator(&r, &xi),
                nabla_xi_h,
                lie_xi_h: DMatrix::from_row_slice(d, d, &values(&lie_xi_h)),
                riemann: TensorValue::new(d, rslots, r)?,
                connection: gamma,
                nabla_phi: (0..d).map(|k| operator_at(&nphi, k, d)).collect(),
                // nxi is stored [k][i]; column k of the matrix is ∇_k ξ
                nabla_xi: DMatrix::from_fn(d, d, |i, k| nxi[k * d + i]),
                metric_residual: ng.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
                frame,
                g,
                xi,
            }
        }
        Backend::Frame(m) => {
            let conn = levi_civita_frame(m);
            let riemann = curvature_from_connection(m, &conn);
            let h = lie_derivative_frame(m, &m.phi) * 0.5;
            let lie_xi_h = lie_derivative_frame(m, &h);
            let nabla_xi_h = conn.nabla_operator(&m.xi, &h);
            let basis = |a: usize| DVector::from_fn(d, |i, _| if i == a { 1.0 } else { 0.0 });
            let nabla_phi = (0..d).map(|a| conn.nabla_operator(&basis(a), &m.phi)).collect();
            let nabla_xi = DMatrix::from_columns(&(0..d).map(|a| conn.along(&basis(a)) * &m.xi).collect::<Vec<_>>());
            let frame = OrthonormalFrame::new(&m.g, &m.xi, p)?;
            DerivedTensors {
                point: p.to_vec(),
                eta: m.eta.clone(),
                xi: m.xi.clone(),
                phi: m.phi.clone(),
                g: m.g.clone(),
                d_eta: m.d_eta(),
                l: jacobi_operator(riemann.components(), &m.xi),
                h,
                nabla_xi_h,
                lie_xi_h,
                riemann,
                metric_residual: metric_compatibility_residual(m, &conn),
                connection: conn.omega,
                nabla_phi,
                nabla_xi,
                frame,
            }
        }
    };
    Ok(out)
}
