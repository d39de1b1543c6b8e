//! Component expressions: parsing, printing and exact jet evaluation.

mod ast;
mod jet;
mod parser;

pub use ast::{EvalError, Expr, Func};
pub use jet::Jet;
pub use parser::{parse_expression, parse_in_chart, ParseError, ParseErrorKind};
