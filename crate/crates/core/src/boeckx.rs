//! The Boeckx invariant `I = (1 − μ/2)/√(1 − κ)` and the sign facts it controls.

use serde::Serialize;
use thiserror::Error;

/// `|I| = 1` within this window counts as the boundary regime.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// `κ` within this distance of 1 is treated as K-contact.
pub const KCONTACT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoeckxError {
    #[error("kappa = {0} exceeds 1; no weak (kappa, mu) structure has that")]
    KappaAboveOne(f64),
    #[error("kappa = {0} is not below 1")]
    KappaNotBelowOne(f64),
    #[error("kappa and mu must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Kcontact,
    AboveOne,
    BelowMinusOne,
    Interior,
    Boundary,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Kcontact => "Kcontact",
            Regime::AboveOne => "AboveOne",
            Regime::BelowMinusOne => "BelowMinusOne",
            Regime::Interior => "Interior",
            Regime::Boundary => "Boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoeckxReport {
    pub kappa: f64,
    pub mu: f64,
    /// `None` in the K-contact case.
    #[serde(rename = "I_M")]
    pub i_m: Option<f64>,
    pub lambda: f64,
    pub regime: Regime,
    pub epsilon: f64,
    pub alpha: f64,
}

pub fn boeckx_invariant(kappa: f64, mu: f64) -> Result<BoeckxReport, BoeckxError> {
    if !kappa.is_finite() || !mu.is_finite() {
        return Err(BoeckxError::NonFinite);
    }
    if kappa > 1.0 + KCONTACT_TOL {
        return Err(BoeckxError::KappaAboveOne(kappa));
    }
    let alpha = (2.0 - mu).powi(2) - 4.0 * (1.0 - kappa);
    if 1.0 - kappa <= KCONTACT_TOL {
        return Ok(BoeckxReport {
            kappa,
            mu,
            i_m: None,
            lambda: 0.0,
            regime: Regime::Kcontact,
            epsilon: 1.0,
            alpha,
        });
    }
    let lambda = (1.0 - kappa).sqrt();
    let i = (1.0 - mu / 2.0) / lambda;
    let regime = if (i.abs() - 1.0).abs() <= BOUNDARY_TOL {
        Regime::Boundary
    } else if i > 1.0 {
        Regime::AboveOne
    } else if i < -1.0 {
        Regime::BelowMinusOne
    } else {
        Regime::Interior
    };
    Ok(BoeckxReport {
        kappa,
        mu,
        i_m: Some(i),
        lambda,
        regime,
        epsilon: if i < 0.0 { -1.0 } else { 1.0 },
        alpha,
    })
}

/// The inequalities of the sign lemma, with `λ = √(1 − κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaPredicates {
    /// `2 − μ − λ > 0`
    pub i_minus: bool,
    /// `2 − μ + λ > 0`
    pub i_plus: bool,
    /// `2 − μ + λ < 0`
    pub ii_plus: bool,
    /// `2 − μ − λ < 0`
    pub ii_minus: bool,
    /// `0 < 2λ + 2 − μ`
    pub iii_a: bool,
    /// `0 < 2λ + μ − 2`
    pub iii_b: bool,
}

impl LemmaPredicates {
    /// `I > 1 ⇒ (i)`, `I < −1 ⇒ (ii)`, `|I| < 1 ⇔ (iii)`.
    pub fn implications_hold(&self, i: f64) -> bool {
        let first = !(i > 1.0) || (self.i_minus && self.i_plus);
        let second = !(i < -1.0) || (self.ii_plus && self.ii_minus);
        let third = (i.abs() < 1.0) == (self.iii_a && self.iii_b);
        first && second && third
    }
}

pub fn lemma_sign_predicates(kappa: f64, mu: f64) -> Result<LemmaPredicates, BoeckxError> {
    if !kappa.is_finite() || !mu.is_finite() {
        return Err(BoeckxError::NonFinite);
    }
    if kappa >= 1.0 {
        return Err(BoeckxError::KappaNotBelowOne(kappa));
    }
    let l = (1.0 - kappa).sqrt();
    let t = 2.0 - mu;
    Ok(LemmaPredicates {
        i_minus: t - l > 0.0,
        i_plus: t + l > 0.0,
        ii_plus: t + l < 0.0,
        ii_minus: t - l < 0.0,
        iii_a: 0.0 < 2.0 * l + 2.0 - mu,
        iii_b: 0.0 < 2.0 * l + mu - 2.0,
    })
}
