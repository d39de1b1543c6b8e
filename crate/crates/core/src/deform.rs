//! `D_a`-homothetic deformations `η̄ = aη, ξ̄ = ξ/a, φ̄ = φ, ḡ = ag + a(a−1)η⊗η`.

use serde::Serialize;
use thiserror::Error;

use crate::chart::{ChartField, Point};
use crate::contact::{derived_tensors, Backend, ChartStructure, ContactError, ContactMetricStructure};
use crate::expr::Expr;
use crate::homogeneous::LieFrameModel;
use crate::kmu::{fit_kappa_mu, KmuError};
use crate::report::{Check, VerificationReport};
use crate::tensor::Slot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeformError {
    #[error("deformation parameter must be positive and finite, got {0}")]
    NonPositive(f64),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Kmu(#[from] KmuError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationParams {
    pub a: f64,
}

impl DeformationParams {
    pub fn new(a: f64) -> Result<Self, DeformError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(DeformError::NonPositive(a));
        }
        Ok(Self { a })
    }
}

fn rebuild(f: &ChartField, comps: Vec<Expr>) -> ChartField {
    ChartField::new(f.name(), f.dim(), f.slots().to_vec(), comps).expect("same layout")
}

/// The deformed structure; `a = 1` returns an identical copy.
pub fn apply_deformation(s: &ContactMetricStructure, a: f64) -> Result<ContactMetricStructure, DeformError> {
    DeformationParams::new(a)?;
    if a == 1.0 {
        return Ok(s.clone());
    }
    let backend = match &s.backend {
        Backend::Chart(c) => {
            let d = c.dim();
            let eta = rebuild(&c.eta, c.eta.components().iter().map(|e| Expr::scaled(a, e)).collect());
            let xi = rebuild(&c.xi, c.xi.components().iter().map(|e| Expr::divided(e, a)).collect());
            let mut g = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let ee = Expr::product(c.eta.component(&[i]), c.eta.component(&[j]));
                    g.push(Expr::sum(
                        Expr::scaled(a, c.g.component(&[i, j])),
                        Expr::scaled(a * (a - 1.0), &ee),
                    ));
                }
            }
            let g = ChartField::new(c.g.name(), d, vec![Slot::Down, Slot::Down], g).expect("d^2 components");
            Backend::Chart(ChartStructure::new(eta, xi, c.phi.clone(), g)?)
        }
        Backend::Frame(m) => {
            let g = &m.g * a + (&m.eta * m.eta.transpose()) * (a * (a - 1.0));
            Backend::Frame(
                LieFrameModel::new(m.brackets.clone(), g, &m.eta * a, &m.xi / a, m.phi.clone())
                    .map_err(ContactError::from)?,
            )
        }
    };
    Ok(ContactMetricStructure {
        name: format!("{}@a={}", s.name, a),
        backend,
        samples: s.samples.clone(),
    })
}

/// `κ̄ = (κ + a² − 1)/a²`, `μ̄ = (μ + 2a − 2)/a`.
pub fn predict_kmu(kappa: f64, mu: f64, a: f64) -> Result<(f64, f64), DeformError> {
    DeformationParams::new(a)?;
    Ok(((kappa + a * a - 1.0) / (a * a), (mu + 2.0 * a - 2.0) / a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureTransformReport {
    pub a: f64,
    pub original: (f64, Option<f64>),
    pub predicted: (f64, Option<f64>),
    pub fitted: (f64, Option<f64>),
    pub report: VerificationReport,
}

/// Compares `l̄` computed on the deformed structure with
/// `l/a² + ((a²−1)/a²)(I − η⊗ξ) + ((2a−2)/a) h̄`, checks `h̄ = h/a`, and
/// compares the fitted deformed `(κ̄, μ̄)` with the prediction.
pub fn check_curvature_transform(
    s: &ContactMetricStructure,
    a: f64,
    p: &Point,
    tol: f64,
) -> Result<CurvatureTransformReport, DeformError> {
    let sb = apply_deformation(s, a)?;
    let t = derived_tensors(s, p)?;
    let tb = derived_tensors(&sb, p)?;
    let a2 = a * a;
    let predicted_l = &t.l / a2 + t.projector() * ((a2 - 1.0) / a2) + &tb.h * ((2.0 * a - 2.0) / a);
    let x = p.coords();
    let mut report = VerificationReport::new(format!("deformation of {} by a = {a}", s.name));
    report.push(Check::upper("curvature transformation", tb.frame.op_norm(&(&tb.l - predicted_l)), tol, x));
    report.push(Check::upper("h_bar = h / a", tb.frame.op_norm(&(&tb.h - &t.h / a)), tol, x));

    let fit = fit_kappa_mu(&t, tol)?;
    let fit_b = fit_kappa_mu(&tb, tol)?;
    let (kp, mp) = predict_kmu(fit.kappa, fit.mu.unwrap_or(0.0), a)?;
    let predicted = (kp, fit.mu.map(|_| mp));
    report.push(Check::upper("fitted kappa_bar = predicted", (fit_b.kappa - kp).abs(), tol, x));
    if let (Some(m), Some(mb)) = (predicted.1, fit_b.mu) {
        report.push(Check::upper("fitted mu_bar = predicted", (mb - m).abs(), tol, x));
    }
    Ok(CurvatureTransformReport {
        a,
        original: (fit.kappa, fit.mu),
        predicted,
        fitted: (fit_b.kappa, fit_b.mu),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(predict_kmu(0.0, 0.0, 2.0).unwrap(), (0.75, 1.0));
        for a in [0.3, 1.7, 5.0] {
            assert!((predict_kmu(1.0, 0.4, a).unwrap().0 - 1.0).abs() < 1e-15);
            assert!((predict_kmu(-2.0, 2.0, a).unwrap().1 - 2.0).abs() < 1e-15);
        }
        assert!(predict_kmu(0.0, 0.0, 0.0).is_err());
        assert!(predict_kmu(0.0, 0.0, -1.0).is_err());
        assert!(predict_kmu(0.0, 0.0, f64::NAN).is_err());
    }
}
