use std::fmt;

use thiserror::Error;

use super::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Neg,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Neg => "neg",
        }
    }

    /// Functions callable by name in source text (`neg` is spelled `-`).
    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

/// Analytic expression in chart coordinates. Variables are zero-based
/// internally and spelled `x1`, `x2`, ... in text.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("variable x{} is outside a chart of dimension {dim}", .index + 1)]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("domain violation in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
    #[error("non-finite value in `{expr}`")]
    NonFinite { expr: String },
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// `a * e`, folding the trivial cases.
    pub fn scaled(a: f64, e: &Expr) -> Expr {
        if a == 1.0 {
            e.clone()
        } else if a == 0.0 || e.is_zero() {
            Expr::zero()
        } else {
            Expr::Mul(Box::new(Expr::Const(a)), Box::new(e.clone()))
        }
    }

    /// `e / a`, folding the trivial cases.
    pub fn divided(e: &Expr, a: f64) -> Expr {
        if a == 1.0 {
            e.clone()
        } else if e.is_zero() {
            Expr::zero()
        } else {
            Expr::Div(Box::new(e.clone()), Box::new(Expr::Const(a)))
        }
    }

    pub fn sum(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    pub fn product(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::zero()
        } else {
            Expr::Mul(Box::new(a.clone()), Box::new(b.clone()))
        }
    }

    /// Highest zero-based variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Func(_, a) => a.max_var(),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), EvalError> {
        match self.max_var() {
            Some(i) if i >= dim => Err(EvalError::VariableOutOfRange { index: i, dim }),
            _ => Ok(()),
        }
    }

    /// Plain value at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64, EvalError> {
        Ok(self.eval_jet(p, 0)?.value())
    }

    /// Exact value, gradient and Hessian (up to `order`) at `p` by
    /// truncated-Taylor arithmetic.
    pub fn eval_jet(&self, p: &[f64], order: u8) -> Result<Jet, EvalError> {
        let d = p.len();
        let j = match self {
            Expr::Const(c) => Jet::constant(d, *c, order),
            Expr::Var(i) => {
                if *i >= d {
                    return Err(EvalError::VariableOutOfRange { index: *i, dim: d });
                }
                Jet::variable(d, *i, p[*i], order)
            }
            Expr::Add(a, b) => &a.eval_jet(p, order)? + &b.eval_jet(p, order)?,
            Expr::Sub(a, b) => &a.eval_jet(p, order)? - &b.eval_jet(p, order)?,
            Expr::Mul(a, b) => &a.eval_jet(p, order)? * &b.eval_jet(p, order)?,
            Expr::Div(a, b) => {
                let den = b.eval_jet(p, order)?;
                if den.value() == 0.0 {
                    return Err(self.domain("division by zero"));
                }
                a.eval_jet(p, order)?.div(&den)
            }
            Expr::Pow(base, exponent) => {
                let b = base.eval_jet(p, order)?;
                let folded = match exponent.as_ref() {
                    Expr::Const(_) => None,
                    e if e.max_var().is_none() => Some(Expr::Const(e.eval(&[])?)),
                    _ => None,
                };
                match folded.as_ref().unwrap_or(exponent.as_ref()) {
                    Expr::Const(c) if c.fract() == 0.0 && c.abs() < i32::MAX as f64 => {
                        if *c < 0.0 && b.value() == 0.0 {
                            return Err(self.domain("negative power of zero"));
                        }
                        b.powi(*c as i32)
                    }
                    Expr::Const(c) => {
                        if b.value() == 0.0 && order == 0 && *c > 0.0 {
                            Jet::constant(d, 0.0, 0)
                        } else if b.value() <= 0.0 {
                            return Err(self.domain("real power of a non-positive base"));
                        } else {
                            b.powf(*c)
                        }
                    }
                    e => {
                        if b.value() <= 0.0 {
                            return Err(self.domain("variable power of a non-positive base"));
                        }
                        (&e.eval_jet(p, order)? * &b.ln()).exp()
                    }
                }
            }
            Expr::Func(f, a) => {
                let x = a.eval_jet(p, order)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Neg => -&x,
                    Func::Sqrt => {
                        if x.value() < 0.0 {
                            return Err(self.domain("square root of a negative value"));
                        }
                        if x.value() == 0.0 && order > 0 {
                            return Err(self.domain("square root is not differentiable at zero"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if !j.value().is_finite() {
            return Err(EvalError::NonFinite {
                expr: self.to_string(),
            });
        }
        Ok(j)
    }

    fn domain(&self, reason: &'static str) -> EvalError {
        EvalError::Domain {
            expr: self.to_string(),
            reason,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Func(Func::Neg, _) => 3,
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimum parentheses needed for `parse(print(e)) == e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => (" + ", 1),
                    Expr::Sub(..) => (" - ", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                write_child(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                write_child(f, b, b.precedence() <= prec)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, a.precedence() <= 4)?;
                f.write_str("^")?;
                write_child(f, b, b.precedence() < 3)
            }
            Expr::Func(Func::Neg, a) => {
                f.write_str("-")?;
                // `-3` would re-parse as a constant, so keep the node visible
                let parens = a.precedence() < 3 || matches!(a.as_ref(), Expr::Const(_));
                write_child(f, a, parens)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
