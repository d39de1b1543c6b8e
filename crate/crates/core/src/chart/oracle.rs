//! Central-difference derivatives from plain point evaluations.
//!
//! Independent of the jet arithmetic: only order-0 evaluations are used.
//! Truncation error is O(step²) for both gradient and Hessian; round-off
//! grows like ε/step for the gradient and ε/step² for the Hessian.

use super::{ChartError, ChartField, Point};
use crate::expr::{Expr, Jet};

/// Approximate order-2 jet of `e` at `p` from a central-difference stencil.
pub fn fd_jet(e: &Expr, p: &Point, step: f64) -> Result<Jet, ChartError> {
    if !(step > 0.0) {
        return Err(ChartError::NonPositiveStep);
    }
    let d = p.len();
    let f = |shift: &[(usize, f64)]| -> Result<f64, ChartError> {
        let mut q = p.to_vec();
        for &(i, s) in shift {
            q[i] += s;
        }
        Ok(e.eval(&q)?)
    };
    let f0 = f(&[])?;
    let h = step;
    let mut grad = vec![0.0; d];
    let mut hess = vec![0.0; d * d];
    for i in 0..d {
        let fp = f(&[(i, h)])?;
        let fm = f(&[(i, -h)])?;
        grad[i] = (fp - fm) / (2.0 * h);
        hess[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..d {
            let fpp = f(&[(i, h), (j, h)])?;
            let fpm = f(&[(i, h), (j, -h)])?;
            let fmp = f(&[(i, -h), (j, h)])?;
            let fmm = f(&[(i, -h), (j, -h)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[i * d + j] = v;
            hess[j * d + i] = v;
        }
    }
    Ok(Jet::from_parts(2, f0, grad, hess))
}

/// Finite-difference jets of every component of `field`.
pub fn finite_difference_oracle(field: &ChartField, p: &Point, step: f64) -> Result<Vec<Jet>, ChartError> {
    if p.len() != field.dim() {
        return Err(ChartError::Dimension(p.len(), field.dim()));
    }
    field.components().iter().map(|e| fd_jet(e, p, step)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expression, EvalError};

    #[test]
    fn square_gradient() {
        let e = parse_expression("x1^2").unwrap();
        let j = fd_jet(&e, &Point::new(vec![3.0]).unwrap(), 1e-4).unwrap();
        assert!((j.grad()[0] - 6.0).abs() < 1e-7);
    }

    #[test]
    fn stencil_leaving_domain() {
        let e = parse_expression("sqrt(x1)").unwrap();
        let r = fd_jet(&e, &Point::new(vec![1e-9]).unwrap(), 1e-4);
        assert!(matches!(r, Err(ChartError::Eval(EvalError::Domain { .. }))));
    }

    #[test]
    fn rejects_bad_step() {
        let e = parse_expression("x1").unwrap();
        assert_eq!(fd_jet(&e, &Point::origin(1), 0.0), Err(ChartError::NonPositiveStep));
    }
}
