//! Fitting `(κ, μ)` and testing the weak and strong `(κ, μ)` conditions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::chart::Point;
use crate::contact::{check_sasakian, derived_tensors, ContactError, ContactMetricStructure, DerivedTensors};
use crate::report::{Check, VerificationReport};
use crate::tensor::{lstsq, sym_eigen, LinearOperator, TensorError};

/// Per-point fits must agree this closely to declare structure-level constants.
pub const CONSTANCY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmuError {
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("not a weak (kappa, mu) point: residual {residual:e} at {point:?}")]
    NotWeakPoint { residual: f64, point: Vec<f64> },
    #[error("K-contact: decomposition degenerate (kappa = {0})")]
    Degenerate(f64),
    #[error("eigenvalue {value} of h is not one of 0, +/-{lambda}")]
    EigenvalueMismatch { value: f64, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaMuReport {
    pub point: Vec<f64>,
    pub kappa: f64,
    /// Absent when `h` vanishes.
    pub mu: Option<f64>,
    pub lambda: f64,
    pub residual_weak: f64,
    pub residual_strong: f64,
    pub h_norm: f64,
    pub is_kcontact: bool,
    pub rank_deficient_mu: bool,
    /// Orthonormal frame used for the fit, one vector per entry, ξ last.
    pub witness_frame: Vec<Vec<f64>>,
}

fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.iter().copied().collect()
}

/// `‖l − κ(I − η⊗ξ) − μh‖` in the orthonormal frame.
pub fn weak_residual(t: &DerivedTensors, kappa: f64, mu: f64) -> f64 {
    t.frame.op_norm(&(&t.l - kappa * t.projector() - mu * &t.h))
}

/// Largest `‖R(X,Y)ξ − κ(η(Y)X − η(X)Y) − μ(η(Y)hX − η(X)hY)‖` over pairs of
/// orthonormal frame vectors.
pub fn strong_residual(t: &DerivedTensors, kappa: f64, mu: f64) -> f64 {
    let f = &t.frame;
    let d = t.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let x = f.vector(i);
        let ex = t.eta.dot(&x);
        let hx = &t.h * &x;
        for j in (i + 1)..d {
            let y = f.vector(j);
            let ey = t.eta.dot(&y);
            let hy = &t.h * &y;
            let lhs = t.curvature(&x, &y, &t.xi);
            let rhs = kappa * (&x * ey - &y * ex) + mu * (hx.clone() * ey - hy * ex);
            worst = worst.max(f.vec_norm(&(lhs - rhs)));
        }
    }
    worst
}

/// Least-squares fit of `l ≈ κ(I − η⊗ξ) + μh` on the contact distribution.
pub fn fit_kappa_mu(t: &DerivedTensors, tol: f64) -> Result<KappaMuReport, KmuError> {
    let f = &t.frame;
    let proj = f.contact_block(&t.projector());
    let hb = f.contact_block(&t.h);
    let lb = f.contact_block(&t.l);
    let h_norm = f.op_norm(&t.h);
    let rank_deficient_mu = h_norm < tol;
    let b = DVector::from_vec(flat(&lb));
    let (kappa, mu) = if rank_deficient_mu {
        let a = DMatrix::from_column_slice(proj.len(), 1, &flat(&proj));
        (lstsq(&a, &b)?.coefficients[0], None)
    } else {
        let mut cols = flat(&proj);
        cols.extend(flat(&hb));
        let a = DMatrix::from_column_slice(proj.len(), 2, &cols);
        let sol = lstsq(&a, &b)?;
        (sol.coefficients[0], Some(sol.coefficients[1]))
    };
    let m = mu.unwrap_or(0.0);
    Ok(KappaMuReport {
        point: t.point.clone(),
        kappa,
        mu,
        lambda: (1.0 - kappa).max(0.0).sqrt(),
        residual_weak: weak_residual(t, kappa, m),
        residual_strong: strong_residual(t, kappa, m),
        h_norm,
        is_kcontact: rank_deficient_mu,
        rank_deficient_mu,
        witness_frame: f.e.column_iter().map(|c| c.iter().copied().collect()).collect(),
    })
}

pub fn estimate_kappa_mu(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<KappaMuReport, KmuError> {
    fit_kappa_mu(&derived_tensors(s, p)?, tol)
}

/// Fits at every sample point and the verdict on whether they are constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureKappaMu {
    pub name: String,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub lambda: f64,
    pub kappa_spread: f64,
    pub mu_spread: f64,
    pub constant: bool,
    pub residual_weak: f64,
    pub residual_strong: f64,
    pub strong_witness: Vec<f64>,
    pub is_kcontact: bool,
    pub points: Vec<KappaMuReport>,
}

impl StructureKappaMu {
    /// Weakly `(κ, μ)` with constant `κ, μ` on the sample set.
    pub fn is_weakly_kmu(&self, tol: f64) -> bool {
        self.constant && self.residual_weak < tol
    }

    pub fn is_strongly_kmu(&self, tol: f64) -> bool {
        self.constant && self.residual_strong < tol
    }
}

fn spread(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let lo = v.clone().fold(f64::INFINITY, f64::min);
    let hi = v.fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

pub fn classify_structure(s: &ContactMetricStructure, tol: f64) -> Result<StructureKappaMu, KmuError> {
    use rayon::prelude::*;
    let points = s
        .sample_points()
        .par_iter()
        .map(|p| estimate_kappa_mu(s, p, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let n = points.len() as f64;
    let kappa = points.iter().map(|r| r.kappa).sum::<f64>() / n;
    let kappa_spread = spread(points.iter().map(|r| r.kappa));
    let all_mu = points.iter().all(|r| r.mu.is_some());
    let none_mu = points.iter().all(|r| r.mu.is_none());
    let (mu, mu_spread) = if all_mu {
        let it = points.iter().map(|r| r.mu.unwrap());
        (Some(it.clone().sum::<f64>() / n), spread(it))
    } else {
        (None, 0.0)
    };
    let strong = points
        .iter()
        .max_by(|a, b| a.residual_strong.total_cmp(&b.residual_strong))
        .expect("at least one sample point");
    Ok(StructureKappaMu {
        name: s.name.clone(),
        kappa,
        mu,
        lambda: (1.0 - kappa).max(0.0).sqrt(),
        kappa_spread,
        mu_spread,
        constant: (all_mu || none_mu) && kappa_spread <= CONSTANCY_TOL && mu_spread <= CONSTANCY_TOL,
        residual_weak: points.iter().map(|r| r.residual_weak).fold(0.0, f64::max),
        residual_strong: strong.residual_strong,
        strong_witness: strong.point.clone(),
        is_kcontact: none_mu,
        points,
    })
}

/// Consequences of the weak condition: `h² = (κ−1)φ²` with `κ ≤ 1`,
/// `∇_ξh = −μφh` and `L_ξh = (2−μ)φh + 2(1−κ)φ`.
pub fn check_weak_consequences(
    s: &ContactMetricStructure,
    p: &Point,
    kappa: f64,
    mu: f64,
    tol: f64,
) -> Result<VerificationReport, KmuError> {
    let t = derived_tensors(s, p)?;
    let residual = weak_residual(&t, kappa, mu);
    if !(residual < tol) {
        return Err(KmuError::NotWeakPoint {
            residual,
            point: p.to_vec(),
        });
    }
    let f = &t.frame;
    let (phi, h) = (&t.phi, &t.h);
    let x = p.coords();
    let mut r = VerificationReport::new(format!("weak (kappa, mu) identities of {}", s.name));
    r.push(Check::upper("h^2 = (kappa - 1) phi^2", f.op_norm(&(h * h - (kappa - 1.0) * phi * phi)), tol, x));
    r.push(Check::upper("kappa <= 1", (kappa - 1.0).max(0.0), tol, x));
    r.push(Check::upper("nabla_xi h = -mu phi h", f.op_norm(&(&t.nabla_xi_h + mu * phi * h)), tol, x));
    r.push(Check::upper(
        "L_xi h = (2 - mu) phi h + 2(1 - kappa) phi",
        f.op_norm(&(&t.lie_xi_h - (2.0 - mu) * phi * h - 2.0 * (1.0 - kappa) * phi)),
        tol,
        x,
    ));
    Ok(r)
}

pub fn check_strong_kmu(s: &ContactMetricStructure, p: &Point, kappa: f64, mu: f64) -> Result<f64, KmuError> {
    Ok(strong_residual(&derived_tensors(s, p)?, kappa, mu))
}

/// Eigendistributions `D(λ)`, `D(−λ)`, `D(0)` of `h` at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenbundleDecomposition {
    pub lambda: f64,
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
    pub zero: Vec<Vec<f64>>,
    /// Largest `|g(u, v)|` between vectors of different bundles.
    pub orthogonality_residual: f64,
    /// Largest `‖hφv + λφv‖` for unit `v ∈ D(λ)`.
    pub phi_swap_residual: f64,
    /// `1 − |g(v, ξ)|` for the unit vector spanning `D(0)`.
    pub xi_residual: f64,
}

impl EigenbundleDecomposition {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.plus.len(), self.minus.len(), self.zero.len())
    }

    pub fn report(&self, n: usize, tol: f64, point: &[f64]) -> VerificationReport {
        let (a, b, c) = self.dims();
        let dim_err = (a.abs_diff(n) + b.abs_diff(n) + c.abs_diff(1)) as f64;
        let mut r = VerificationReport::new("eigenbundles of h");
        r.push(Check::upper("dims (n, n, 1)", dim_err, 0.5, point));
        r.push(Check::upper("mutually orthogonal", self.orthogonality_residual, tol, point));
        r.push(Check::upper("phi D(lambda) = D(-lambda)", self.phi_swap_residual, tol, point));
        r.push(Check::upper("D(0) spanned by xi", self.xi_residual, tol, point));
        r
    }
}

pub fn eigenbundles(s: &ContactMetricStructure, p: &Point, kappa: f64, tol: f64) -> Result<EigenbundleDecomposition, KmuError> {
    if kappa >= 1.0 - tol {
        return Err(KmuError::Degenerate(kappa));
    }
    let t = derived_tensors(s, p)?;
    let lambda = (1.0 - kappa).sqrt();
    let eig = sym_eigen(&LinearOperator::new(t.h.clone()), &t.g, 1e-8)?;
    let cls_tol = 1e-6 * lambda.max(1.0);
    let (mut plus, mut minus, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &v) in eig.values.iter().enumerate() {
        let vec = eig.vector(i);
        if (v - lambda).abs() <= cls_tol {
            plus.push(vec);
        } else if (v + lambda).abs() <= cls_tol {
            minus.push(vec);
        } else if v.abs() <= cls_tol {
            zero.push(vec);
        } else {
            return Err(KmuError::EigenvalueMismatch { value: v, lambda });
        }
    }
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &t.g * b)[(0, 0)];
    let mut orth: f64 = 0.0;
    for (a, b) in [(&plus, &minus), (&plus, &zero), (&minus, &zero)] {
        for u in a.iter() {
            for v in b.iter() {
                orth = orth.max(ip(u, v).abs());
            }
        }
    }
    let mut swap: f64 = 0.0;
    for v in &plus {
        let pv = &t.phi * v;
        swap = swap.max(t.frame.vec_norm(&(&t.h * &pv + lambda * &pv)));
    }
    let xi_residual = zero.iter().map(|v| 1.0 - ip(v, &t.xi).abs()).fold(0.0, f64::max);
    let to_vecs = |vs: Vec<DVector<f64>>| vs.into_iter().map(|v| v.iter().copied().collect()).collect();
    Ok(EigenbundleDecomposition {
        lambda,
        plus: to_vecs(plus),
        minus: to_vecs(minus),
        zero: to_vecs(zero),
        orthogonality_residual: orth,
        phi_swap_residual: swap,
        xi_residual,
    })
}

/// Largest norm of `R(X,ξ)(lY) − l(R(X,ξ)Y) − R(Y, lX)ξ − R(Y,ξ)(lX)` over
/// orthonormal frame pairs; this is `(R(X,ξ)·R)(Y,ξ)ξ`.
pub fn semisymmetry_residual(t: &DerivedTensors) -> f64 {
    let f = &t.frame;
    let d = t.dim();
    let xi = &t.xi;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let x = f.vector(i);
        let lx = &t.l * &x;
        for j in 0..d {
            let y = f.vector(j);
            let ly = &t.l * &y;
            let v = t.curvature(&x, xi, &ly)
                - &t.l * t.curvature(&x, xi, &y)
                - t.curvature(&y, &lx, xi)
                - t.curvature(&y, xi, &lx);
            worst = worst.max(f.vec_norm(&v));
        }
    }
    worst
}

/// Largest norm of the full derivation `(R(X,ξ)·R)(Y,Z)W` over orthonormal
/// frame quadruples. Much stronger than [`semisymmetry_residual`].
pub fn full_semisymmetry_residual(t: &DerivedTensors) -> f64 {
    let f = &t.frame;
    let d = t.dim();
    let basis: Vec<DVector<f64>> = (0..d).map(|i| f.vector(i)).collect();
    let mut worst: f64 = 0.0;
    for x in &basis {
        let act: Vec<DVector<f64>> = basis.iter().map(|u| t.curvature(x, &t.xi, u)).collect();
        for (j, y) in basis.iter().enumerate() {
            for (k, z) in basis.iter().enumerate() {
                for (l, w) in basis.iter().enumerate() {
                    let v = t.curvature(x, &t.xi, &t.curvature(y, z, w))
                        - t.curvature(&act[j], z, w)
                        - t.curvature(y, &act[k], w)
                        - t.curvature(y, z, &act[l]);
                    worst = worst.max(f.vec_norm(&v));
                }
            }
        }
    }
    worst
}

pub fn check_weak_semisymmetry(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<VerificationReport, KmuError> {
    let t = derived_tensors(s, p)?;
    let mut r = VerificationReport::new(format!("weak semi-symmetry of {}", s.name));
    r.push(Check::upper("(R(X,xi).R)(Y,xi)xi = 0", semisymmetry_residual(&t), tol, p.coords()));
    Ok(r)
}

/// The chain "weakly (κ,0) and weakly semi-symmetric ⇒ strongly (κ,0)" and
/// "K-contact and weakly semi-symmetric ⇒ Sasakian", evaluated at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemisymmetryScenario {
    pub point: Vec<f64>,
    /// `κ` fitted with `μ` forced to zero.
    pub kappa: f64,
    pub weak_k0_residual: f64,
    pub semisymmetry_residual: f64,
    /// Diagnostic only: the full derivation `R(X,ξ)·R`.
    pub full_semisymmetry_residual: f64,
    pub strong_k0_residual: f64,
    pub h_norm: f64,
    pub sasakian_residual: f64,
    /// `Some(holds)` when the hypotheses of the first implication are met.
    pub strong_implication: Option<bool>,
    /// `Some(holds)` when the hypotheses of the second implication are met.
    pub sasakian_implication: Option<bool>,
}

/// `gate` decides the hypotheses; conclusions are accepted up to `10 * gate`.
pub fn semisymmetry_scenario(s: &ContactMetricStructure, p: &Point, gate: f64) -> Result<SemisymmetryScenario, KmuError> {
    let t = derived_tensors(s, p)?;
    let f = &t.frame;
    let proj = f.contact_block(&t.projector());
    let lb = f.contact_block(&t.l);
    let kappa = lb.dot(&proj) / proj.dot(&proj);
    let weak = weak_residual(&t, kappa, 0.0);
    let semi = semisymmetry_residual(&t);
    let strong = strong_residual(&t, kappa, 0.0);
    let h_norm = f.op_norm(&t.h);
    let sas = check_sasakian(s, p, gate)?;
    let sasakian_residual = sas.report.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let hyp = weak < gate && semi < gate;
    Ok(SemisymmetryScenario {
        point: p.to_vec(),
        kappa,
        weak_k0_residual: weak,
        semisymmetry_residual: semi,
        full_semisymmetry_residual: full_semisymmetry_residual(&t),
        strong_k0_residual: strong,
        h_norm,
        sasakian_residual,
        strong_implication: hyp.then_some(strong < 10.0 * gate),
        sasakian_implication: (h_norm < gate && semi < gate).then_some(sasakian_residual < 10.0 * gate),
    })
}
