//! Contact metric structures `(η, ξ, φ, g)` and the checks that make sense
//! for any of them.

mod checks;
mod geometry;
mod onb;

pub use checks::{
    check_kcontact, check_oracle, check_sasakian, check_structural_identities, verify_axioms, verify_axioms_at,
    SasakianReport,
};
pub use geometry::{derived_tensors, DerivedTensors};
pub use onb::OrthonormalFrame;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::chart::{ChartError, ChartField, Point};
use crate::homogeneous::{LieError, LieFrameModel};
use crate::report::VerificationReport;
use crate::samples::SampleSet;
use crate::tensor::{Slot, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("field `{field}` must have valence {expected:?}")]
    Valence { field: &'static str, expected: (usize, usize) },
    #[error("dimension must be odd and at least 3, got {0}")]
    EvenDimension(usize),
    #[error("fields disagree on the dimension ({0} vs {1})")]
    Dimension(usize, usize),
    #[error("point has {got} coordinates, structure dimension is {dim}")]
    PointDimension { got: usize, dim: usize },
    #[error("metric is not positive definite at {0:?}")]
    NotRiemannian(Vec<f64>),
}

/// Chart data: every field given by component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartStructure {
    pub eta: ChartField,
    pub xi: ChartField,
    pub phi: ChartField,
    pub g: ChartField,
}

impl ChartStructure {
    pub fn new(eta: ChartField, xi: ChartField, phi: ChartField, g: ChartField) -> Result<Self, ContactError> {
        let expect = |f: &ChartField, field: &'static str, slots: &[Slot]| {
            if f.slots() != slots {
                let up = slots.iter().filter(|s| **s == Slot::Up).count();
                return Err(ContactError::Valence {
                    field,
                    expected: (up, slots.len() - up),
                });
            }
            Ok(())
        };
        expect(&eta, "eta", &[Slot::Down])?;
        expect(&xi, "xi", &[Slot::Up])?;
        expect(&phi, "phi", &[Slot::Up, Slot::Down])?;
        expect(&g, "g", &[Slot::Down, Slot::Down])?;
        let d = eta.dim();
        for f in [&xi, &phi, &g] {
            if f.dim() != d {
                return Err(ContactError::Dimension(d, f.dim()));
            }
        }
        Ok(Self { eta, xi, phi, g })
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Chart(ChartStructure),
    /// Left-invariant data on a Lie group; every point looks the same.
    Frame(LieFrameModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactMetricStructure {
    pub name: String,
    pub backend: Backend,
    pub samples: SampleSet,
}

/// `(η, ξ, φ, g)` at one point.
pub type PointValues = (DVector<f64>, DVector<f64>, DMatrix<f64>, DMatrix<f64>);

impl ContactMetricStructure {
    pub fn chart(name: impl Into<String>, data: ChartStructure) -> Result<Self, ContactError> {
        check_odd(data.dim())?;
        Ok(Self {
            name: name.into(),
            backend: Backend::Chart(data),
            samples: SampleSet::default(),
        })
    }

    pub fn frame(name: impl Into<String>, model: LieFrameModel) -> Result<Self, ContactError> {
        let d = model.dim();
        check_odd(d)?;
        Ok(Self {
            name: name.into(),
            backend: Backend::Frame(model),
            // left-invariant data: the identity represents the whole group
            samples: SampleSet::default().with_count(0).with_point(vec![0.0; d]),
        })
    }

    pub fn with_samples(mut self, samples: SampleSet) -> Self {
        self.samples = samples;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        match &self.backend {
            Backend::Chart(c) => c.dim(),
            Backend::Frame(m) => m.dim(),
        }
    }

    /// `n` in `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn is_frame(&self) -> bool {
        matches!(self.backend, Backend::Frame(_))
    }

    pub fn sample_points(&self) -> Vec<Point> {
        self.samples.points(self.dim())
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<(), ContactError> {
        if p.len() != self.dim() {
            return Err(ContactError::PointDimension {
                got: p.len(),
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Values of `(η, ξ, φ, g)` at `p`.
    pub fn values_at(&self, p: &Point) -> Result<PointValues, ContactError> {
        self.check_point(p)?;
        match &self.backend {
            Backend::Frame(m) => Ok((m.eta.clone(), m.xi.clone(), m.phi.clone(), m.g.clone())),
            Backend::Chart(c) => {
                let d = c.dim();
                let eta = DVector::from_vec(c.eta.eval(p, 0)?.values());
                let xi = DVector::from_vec(c.xi.eval(p, 0)?.values());
                let phi = DMatrix::from_row_slice(d, d, &c.phi.eval(p, 0)?.values());
                let g = DMatrix::from_row_slice(d, d, &c.g.eval(p, 0)?.values());
                Ok((eta, xi, phi, g))
            }
        }
    }

    /// Run a per-point report over every sample point (in parallel) and keep
    /// the worst residual of each check.
    pub fn over_samples<F>(&self, subject: &str, f: F) -> Result<VerificationReport, ContactError>
    where
        F: Fn(&Point) -> Result<VerificationReport, ContactError> + Sync,
    {
        let reports = self
            .sample_points()
            .par_iter()
            .map(&f)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VerificationReport::worst_of(subject, reports))
    }
}

fn check_odd(d: usize) -> Result<(), ContactError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(ContactError::EvenDimension(d));
    }
    Ok(())
}
