//! Tensor fields on a single coordinate chart and the Riemannian calculus
//! built from their order-2 jets.

mod calculus;
mod oracle;

pub use calculus::{
    christoffel, covariant_derivative, exterior_derivative, lie_bracket, lie_derivative_11, riemann,
    Christoffel,
};
pub use oracle::{fd_jet, finite_difference_oracle};

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_in_chart, EvalError, Expr, Jet, ParseError};
use crate::tensor::{Slot, TensorValue};

pub mod jets {
    //! Field-level calculus on arrays of jets, for callers that already
    //! hold evaluated (and possibly derived) fields.
    pub use super::calculus::{
        connection_jets, exterior_derivative_jets, lie_bracket_jets, lie_derivative_11_jets,
        metric_inverse_jets, nabla_covector, nabla_metric, nabla_operator, nabla_vector,
        riemann_from_connection,
    };
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("field `{name}` has valence {got:?}, expected {expected:?}")]
    Valence {
        name: String,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("unsupported valence {0:?} for this operation")]
    UnsupportedValence((usize, usize)),
    #[error("field `{name}` expects {expected} components, got {got}")]
    ComponentCount { name: String, expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("metric is singular at the evaluation point")]
    SingularMetric,
    #[error("finite-difference step must be positive")]
    NonPositiveStep,
    #[error("point has non-finite coordinates")]
    NonFinitePoint,
}

/// Chart coordinates of a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, ChartError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ChartError::NonFinitePoint);
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

/// A tensor field given by one analytic expression per component,
/// stored row-major in slot order (contravariant slots first).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartField {
    name: String,
    dim: usize,
    slots: Vec<Slot>,
    components: Vec<Expr>,
}

/// Jets of every component of a field at one point.
#[derive(Debug, Clone)]
pub struct JetField {
    pub dim: usize,
    pub slots: Vec<Slot>,
    pub comps: Vec<Jet>,
}

impl JetField {
    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    pub fn to_tensor(&self) -> TensorValue {
        TensorValue::new(self.dim, self.slots.clone(), self.values()).expect("consistent layout")
    }
}

fn valence_of(slots: &[Slot]) -> (usize, usize) {
    let up = slots.iter().filter(|s| **s == Slot::Up).count();
    (up, slots.len() - up)
}

impl ChartField {
    pub fn new(name: impl Into<String>, dim: usize, slots: Vec<Slot>, components: Vec<Expr>) -> Result<Self, ChartError> {
        let name = name.into();
        let expected = dim.pow(slots.len() as u32);
        if components.len() != expected {
            return Err(ChartError::ComponentCount {
                name,
                expected,
                got: components.len(),
            });
        }
        for c in &components {
            c.check_dim(dim)?;
        }
        Ok(Self {
            name,
            dim,
            slots,
            components,
        })
    }

    /// Parse one source string per component.
    pub fn parse<S: AsRef<str>>(name: impl Into<String>, dim: usize, slots: Vec<Slot>, sources: &[S]) -> Result<Self, ChartError> {
        let comps = sources
            .iter()
            .map(|s| parse_in_chart(s.as_ref(), dim))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, dim, slots, comps)
    }

    pub fn vector(name: impl Into<String>, components: Vec<Expr>) -> Result<Self, ChartError> {
        let d = components.len();
        Self::new(name, d, vec![Slot::Up], components)
    }

    pub fn covector(name: impl Into<String>, components: Vec<Expr>) -> Result<Self, ChartError> {
        let d = components.len();
        Self::new(name, d, vec![Slot::Down], components)
    }

    /// The coordinate vector field `∂_k` (zero-based `k`).
    pub fn coordinate_vector(dim: usize, k: usize) -> Self {
        let comps = (0..dim).map(|i| Expr::Const(if i == k { 1.0 } else { 0.0 })).collect();
        Self::vector(format!("d/dx{}", k + 1), comps).expect("valid layout")
    }

    pub fn identity_11(dim: usize) -> Self {
        let comps = (0..dim * dim)
            .map(|f| Expr::Const(if f / dim == f % dim { 1.0 } else { 0.0 }))
            .collect();
        Self::new("Id", dim, vec![Slot::Up, Slot::Down], comps).expect("valid layout")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn valence(&self) -> (usize, usize) {
        valence_of(&self.slots)
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, idx: &[usize]) -> &Expr {
        let o = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        &self.components[o]
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn expect_valence(&self, expected: (usize, usize)) -> Result<(), ChartError> {
        let got = self.valence();
        if got != expected {
            return Err(ChartError::Valence {
                name: self.name.clone(),
                got,
                expected,
            });
        }
        Ok(())
    }

    pub fn eval(&self, p: &Point, order: u8) -> Result<JetField, ChartError> {
        if p.len() != self.dim {
            return Err(ChartError::Dimension(p.len(), self.dim));
        }
        let comps = self
            .components
            .iter()
            .map(|e| e.eval_jet(p, order))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(JetField {
            dim: self.dim,
            slots: self.slots.clone(),
            comps,
        })
    }

    pub fn value_at(&self, p: &Point) -> Result<TensorValue, ChartError> {
        Ok(self.eval(p, 0)?.to_tensor())
    }
}
