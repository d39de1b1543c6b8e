//! Named example structures and the `.kmu` structure file format.

mod builtins;
mod spec_file;
mod sweep;

pub use builtins::{builtin, darboux_sasakian, darboux_weak, lie_family, BUILTIN_NAMES};
pub use sweep::{sweep_lie_family, SweepRow};
pub use spec_file::{load_spec, load_spec_with, normalize, parse_spec, render_spec, save_spec, LoadOptions};

use thiserror::Error;

use crate::contact::ContactError;
use crate::deform::DeformError;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error("unknown built-in structure `{0}`")]
    UnknownBuiltin(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: `{key}`: {message}")]
    Expression { key: String, line: usize, message: String },
    #[error("{0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("axiom check `{check}` failed on load: residual {residual:e} at {point:?}")]
    AxiomFailure { check: String, residual: f64, point: Vec<f64> },
}
