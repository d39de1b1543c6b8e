//! Two structures built from a non-K-contact weakly `(κ, μ)` structure:
//! a K-contact one when `|I| > 1` and a weakly `(κ + (1 − μ/2)², 2)` one
//! when `|I| < 1`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::boeckx::{boeckx_invariant, BoeckxError, Regime};
use crate::chart::Point;
use crate::contact::{check_kcontact, derived_tensors, verify_axioms, Backend, ContactError, ContactMetricStructure, DerivedTensors};
use crate::deform::{apply_deformation, DeformError};
use crate::homogeneous::{lie_derivative_frame, LieFrameModel};
use crate::kmu::{classify_structure, eigenbundles, KmuError};
use crate::report::{Check, VerificationReport};
use crate::tensor::{sym_eigen, LinearOperator};

fn fmt_i(i: Option<f64>) -> String {
    i.map_or("undefined".into(), |x| format!("{x}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    Kcontact,
    Mu2,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Kcontact => "kcontact",
            Target::Mu2 => "mu2",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error(transparent)]
    Boeckx(#[from] BoeckxError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Kmu(#[from] KmuError),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error("input is K-contact; the constructions need kappa < 1")]
    AlreadyKcontact,
    #[error("construction requires {requirement}, but the structure is in regime {} (I = {})", regime.as_str(), fmt_i(*i_m))]
    RegimeGate {
        requirement: &'static str,
        regime: Regime,
        i_m: Option<f64>,
    },
    #[error("(kappa, mu) is not constant over the samples (spreads {kappa_spread:e}, {mu_spread:e})")]
    NotConstant { kappa_spread: f64, mu_spread: f64 },
    #[error("structure is not weakly (kappa, mu): residual {0:e}")]
    NotWeak(f64),
    #[error("chart structures are only constructed pointwise; use construct_pointwise")]
    ChartPointwiseOnly,
    #[error("constructed data is not a valid frame model: {0}")]
    InvalidOutput(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionPlan {
    pub kappa: f64,
    pub mu: f64,
    pub lambda: f64,
    pub target: Target,
    pub i_m: f64,
    pub epsilon: f64,
    /// `(2 − μ)² − 4(1 − κ)`.
    pub alpha: f64,
    /// `1 − κ − (1 − μ/2)²`.
    pub beta: f64,
    /// `1/((1−κ)√α)` or `1/(2√(1−κ)√β)`.
    pub normalizer: f64,
    pub predicted_kappa: f64,
    pub predicted_mu: Option<f64>,
    /// `√(1 − I²)`, the factor relating the new `h` to the old one.
    pub h_scale: Option<f64>,
    pub predicted_lambda: f64,
}

/// Regime gate and the constants of the construction.
pub fn plan_construction(kappa: f64, mu: f64, target: Target) -> Result<ConstructionPlan, ConstructionError> {
    let b = boeckx_invariant(kappa, mu)?;
    let Some(i_m) = b.i_m else {
        return Err(ConstructionError::AlreadyKcontact);
    };
    let lambda = b.lambda;
    let beta = 1.0 - kappa - (1.0 - mu / 2.0).powi(2);
    let gate = |requirement| ConstructionError::RegimeGate {
        requirement,
        regime: b.regime,
        i_m: b.i_m,
    };
    match target {
        Target::Kcontact => {
            if !matches!(b.regime, Regime::AboveOne | Regime::BelowMinusOne) {
                return Err(gate("|I| > 1"));
            }
            Ok(ConstructionPlan {
                kappa,
                mu,
                lambda,
                target,
                i_m,
                epsilon: b.epsilon,
                alpha: b.alpha,
                beta,
                normalizer: 1.0 / ((1.0 - kappa) * b.alpha.sqrt()),
                predicted_kappa: 1.0,
                predicted_mu: None,
                h_scale: None,
                predicted_lambda: 0.0,
            })
        }
        Target::Mu2 => {
            if b.regime != Regime::Interior {
                return Err(gate("|I| < 1"));
            }
            Ok(ConstructionPlan {
                kappa,
                mu,
                lambda,
                target,
                i_m,
                epsilon: b.epsilon,
                alpha: b.alpha,
                beta,
                normalizer: 1.0 / (2.0 * lambda * beta.sqrt()),
                predicted_kappa: kappa + (1.0 - mu / 2.0).powi(2),
                predicted_mu: Some(2.0),
                h_scale: Some((1.0 - i_m * i_m).sqrt()),
                predicted_lambda: beta.sqrt(),
            })
        }
    }
}

/// The new `φ` from the derived tensors of the source structure.
fn new_phi(t: &DerivedTensors, plan: &ConstructionPlan) -> DMatrix<f64> {
    match plan.target {
        Target::Kcontact => &t.lie_xi_h * &t.h * (plan.epsilon * plan.normalizer),
        Target::Mu2 => {
            let lam2 = plan.lambda * plan.lambda;
            ((2.0 - plan.mu) * &t.phi * &t.h + 2.0 * lam2 * &t.phi) * plan.normalizer
        }
    }
}

/// `g'(X, Y) = −½ dη(X, φ'Y) + η(X)η(Y)`.
fn associated_metric(t: &DerivedTensors, phi: &DMatrix<f64>) -> DMatrix<f64> {
    -0.5 * &t.d_eta * phi + &t.eta * t.eta.transpose()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseConstruction {
    pub phi: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

/// The constructed `(φ', g')` at one point, for any backend.
pub fn construct_pointwise(
    s: &ContactMetricStructure,
    p: &Point,
    plan: &ConstructionPlan,
) -> Result<PointwiseConstruction, ConstructionError> {
    let t = derived_tensors(s, p)?;
    let phi = new_phi(&t, plan);
    let g = associated_metric(&t, &phi);
    Ok(PointwiseConstruction { phi, g })
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub structure: ContactMetricStructure,
    pub plan: ConstructionPlan,
    pub report: VerificationReport,
}

fn min_restricted_eig(g: &DMatrix<f64>, basis: &[Vec<f64>]) -> f64 {
    if basis.is_empty() {
        return f64::NAN;
    }
    let b = DMatrix::from_columns(&basis.iter().map(|v| DVector::from_column_slice(v)).collect::<Vec<_>>());
    let m = b.transpose() * g * &b;
    let sym = (&m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

fn source_plan(s: &ContactMetricStructure, target: Target, tol: f64) -> Result<ConstructionPlan, ConstructionError> {
    let cls = classify_structure(s, tol)?;
    if cls.is_kcontact {
        return Err(ConstructionError::AlreadyKcontact);
    }
    if !cls.constant {
        return Err(ConstructionError::NotConstant {
            kappa_spread: cls.kappa_spread,
            mu_spread: cls.mu_spread,
        });
    }
    if !(cls.residual_weak < tol) {
        return Err(ConstructionError::NotWeak(cls.residual_weak));
    }
    let mu = cls.mu.ok_or(ConstructionError::AlreadyKcontact)?;
    plan_construction(cls.kappa, mu, target)
}

fn build(s: &ContactMetricStructure, target: Target, tol: f64) -> Result<Construction, ConstructionError> {
    let plan = source_plan(s, target, tol)?;
    let Backend::Frame(m) = &s.backend else {
        return Err(ConstructionError::ChartPointwiseOnly);
    };
    let origin = Point::origin(m.dim());
    let t = derived_tensors(s, &origin)?;
    let phi = new_phi(&t, &plan);
    let g = associated_metric(&t, &phi);
    let model = LieFrameModel::new(m.brackets.clone(), g.clone(), m.eta.clone(), m.xi.clone(), phi.clone())
        .map_err(|e| ConstructionError::InvalidOutput(e.to_string()))?;
    let suffix = match target {
        Target::Kcontact => "kcontact",
        Target::Mu2 => "mu2",
    };
    let out = ContactMetricStructure::frame(format!("{}/{suffix}", s.name), model)?;

    let x = origin.coords();
    let f = &t.frame;
    let minus_p = -t.projector();
    let mut r = VerificationReport::new(format!("{suffix} construction from {}", s.name));
    let bundles = eigenbundles(s, &origin, plan.kappa, tol)?;
    match target {
        Target::Kcontact => {
            let a = &t.lie_xi_h * &t.h;
            r.push(Check::upper("L_xi(L_xi h o h) = 0", f.op_norm(&lie_derivative_frame(m, &a)), tol, x));
            let l4 = plan.lambda.powi(4);
            r.push(Check::upper(
                "(L_xi h o h)^2 = lambda^4 alpha (-I + eta (x) xi)",
                f.op_norm(&(&a * &a - &minus_p * (l4 * plan.alpha))),
                tol * l4.max(1.0) * plan.alpha.max(1.0),
                x,
            ));
            let two_mu = 2.0 - plan.mu;
            r.push(Check::lower("epsilon((2 - mu) + 2 lambda) > 0", plan.epsilon * (two_mu + 2.0 * plan.lambda), 0.0, x));
            r.push(Check::lower("epsilon((2 - mu) - 2 lambda) > 0", plan.epsilon * (two_mu - 2.0 * plan.lambda), 0.0, x));
        }
        Target::Mu2 => {
            let lam = plan.lambda;
            let h_tilde = ((2.0 - plan.mu) * &t.phi * &t.h + 2.0 * lam * lam * &t.phi) / (2.0 * lam);
            r.push(Check::upper(
                "h_tilde^2 = (1 - kappa - (1 - mu/2)^2) phi^2",
                f.op_norm(&(&h_tilde * &h_tilde - plan.beta * &t.phi * &t.phi)),
                tol,
                x,
            ));
        }
    }
    r.push(Check::upper("new phi^2 = -I + eta (x) xi", f.op_norm(&(&phi * &phi - &minus_p)), tol, x));
    r.push(Check::upper("new g symmetric", (&g - g.transpose()).amax(), tol, x));
    r.push(Check::lower("new g positive on D(lambda)", min_restricted_eig(&g, &bundles.plus), tol, x));
    r.push(Check::lower("new g positive on D(-lambda)", min_restricted_eig(&g, &bundles.minus), tol, x));
    r.push(Check::upper("2 new g(X, new phi Y) = d eta(X, Y)", (2.0 * &g * &phi - &t.d_eta).amax(), tol, x));

    let prefixed = |rep: VerificationReport, r: &mut VerificationReport| {
        for mut c in rep.checks {
            c.check_name = format!("output: {}", c.check_name);
            r.push(c);
        }
    };
    prefixed(verify_axioms(&out, tol)?, &mut r);
    let tn = derived_tensors(&out, &origin)?;
    match target {
        Target::Kcontact => prefixed(check_kcontact(&out, &origin, tol)?, &mut r),
        Target::Mu2 => {
            let cls = classify_structure(&out, tol)?;
            r.push(Check::upper("output: kappa = kappa + (1 - mu/2)^2", (cls.kappa - plan.predicted_kappa).abs(), tol, x));
            let mu1 = cls.mu.unwrap_or(f64::NAN);
            r.push(Check::upper("output: mu = 2", (mu1 - 2.0).abs(), tol, x));
            r.push(Check::upper("output: weak residual", cls.residual_weak, tol, x));
            let scale = plan.h_scale.expect("mu2 plan");
            r.push(Check::upper("output: h = sqrt(1 - I^2) h_source", tn.frame.op_norm(&(&tn.h - &t.h * scale)), tol, x));
            let eig = sym_eigen(&LinearOperator::new(tn.h.clone()), &tn.g, 1e-8).map_err(KmuError::from)?;
            let top = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            r.push(Check::upper("output: lambda = sqrt(beta)", (top - plan.predicted_lambda).abs(), tol, x));
            let lam1 = plan.predicted_lambda;
            let chain = 2.0 * &tn.h - (1.0 + lam1 * lam1) * &tn.phi * &tn.phi + &tn.phi * &tn.lie_xi_h;
            r.push(Check::upper(
                "output: l = 2h - (1 + lambda^2) phi^2 + phi L_xi h",
                tn.frame.op_norm(&(&tn.l - chain)),
                tol,
                x,
            ));
        }
    }
    Ok(Construction {
        structure: out,
        plan,
        report: r,
    })
}

/// K-contact structure with the same `η, ξ`; needs `|I| > 1`.
pub fn build_kcontact(s: &ContactMetricStructure, tol: f64) -> Result<Construction, ConstructionError> {
    build(s, Target::Kcontact, tol)
}

/// Weakly `(κ + (1 − μ/2)², 2)` structure with the same `η, ξ`; needs `|I| < 1`.
pub fn build_mu2(s: &ContactMetricStructure, tol: f64) -> Result<Construction, ConstructionError> {
    build(s, Target::Mu2, tol)
}

pub fn build_target(s: &ContactMetricStructure, target: Target, tol: f64) -> Result<Construction, ConstructionError> {
    build(s, target, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixednessEntry {
    pub a: f64,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixednessReport {
    pub target: Target,
    pub entries: Vec<FixednessEntry>,
}

impl FixednessReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

/// Deform by each `a` and refit: K-contact outputs keep `κ = 1`, `μ = 2`
/// outputs keep `μ = 2`.
pub fn verify_fixedness(
    s: &ContactMetricStructure,
    target: Target,
    a_samples: &[f64],
    tol: f64,
) -> Result<FixednessReport, ConstructionError> {
    let entries = a_samples
        .iter()
        .map(|&a| {
            let cls = classify_structure(&apply_deformation(s, a)?, tol)?;
            let holds = match target {
                Target::Kcontact => (cls.kappa - 1.0).abs() < tol,
                Target::Mu2 => cls.mu.is_some_and(|m| (m - 2.0).abs() < tol),
            };
            Ok(FixednessEntry {
                a,
                kappa: cls.kappa,
                mu: cls.mu,
                holds,
            })
        })
        .collect::<Result<Vec<_>, ConstructionError>>()?;
    Ok(FixednessReport { target, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_constants() {
        let p = plan_construction(0.75, 0.0, Target::Kcontact).unwrap();
        assert!((p.alpha - 3.0).abs() < 1e-15);
        assert_eq!(p.epsilon, 1.0);
        assert!((p.normalizer - 1.0 / (0.25 * 3f64.sqrt())).abs() < 1e-14);

        let p = plan_construction(0.0, 1.0, Target::Mu2).unwrap();
        assert!((p.predicted_kappa - 0.25).abs() < 1e-15);
        assert_eq!(p.predicted_mu, Some(2.0));
        assert!((p.h_scale.unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.predicted_lambda - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gates() {
        assert!(matches!(
            plan_construction(0.0, 0.0, Target::Kcontact),
            Err(ConstructionError::RegimeGate { regime: Regime::Boundary, .. })
        ));
        assert!(matches!(
            plan_construction(0.0, 0.0, Target::Mu2),
            Err(ConstructionError::RegimeGate { .. })
        ));
        assert!(matches!(plan_construction(0.0, 1.0, Target::Kcontact), Err(ConstructionError::RegimeGate { .. })));
        assert!(matches!(plan_construction(0.75, 0.0, Target::Mu2), Err(ConstructionError::RegimeGate { .. })));
        assert_eq!(plan_construction(1.0, 0.0, Target::Mu2), Err(ConstructionError::AlreadyKcontact));
    }
}
