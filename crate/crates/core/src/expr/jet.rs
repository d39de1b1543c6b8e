use std::ops::{Add, Mul, Neg, Sub};

/// Truncated Taylor data of a scalar at a point: value, gradient and
/// Hessian, each present up to `order`.
///
/// Slots above the order are kept at zero, so an order-1 jet has a zero
/// Hessian and an order-0 jet is a bare value.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: u8,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet {
    pub fn constant(dim: usize, value: f64, order: u8) -> Self {
        Self {
            order: order.min(2),
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    /// The coordinate function `x_index` (zero-based) evaluated at `value`.
    pub fn variable(dim: usize, index: usize, value: f64, order: u8) -> Self {
        let mut j = Self::constant(dim, value, order);
        if j.order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    pub fn from_parts(order: u8, value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Self {
        let d = grad.len();
        assert_eq!(hess.len(), d * d, "hessian must be dim x dim");
        let mut j = Self {
            order: order.min(2),
            value,
            grad,
            hess,
        };
        j.truncate();
        j
    }

    fn truncate(&mut self) {
        if self.order < 2 {
            self.hess.iter_mut().for_each(|h| *h = 0.0);
        }
        if self.order < 1 {
            self.grad.iter_mut().for_each(|g| *g = 0.0);
        }
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    pub fn hess_flat(&self) -> &[f64] {
        &self.hess
    }

    /// Partial derivative `∂_k` as a jet of one order less.
    ///
    /// Panics on an order-0 jet, which carries no derivative information.
    pub fn partial(&self, k: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let d = self.dim();
        let order = self.order - 1;
        let grad = if order >= 1 {
            self.hess[k * d..(k + 1) * d].to_vec()
        } else {
            vec![0.0; d]
        };
        Jet {
            order,
            value: self.grad[k],
            grad,
            hess: vec![0.0; d * d],
        }
    }

    pub fn scale(&self, a: f64) -> Jet {
        Jet {
            order: self.order,
            value: a * self.value,
            grad: self.grad.iter().map(|g| a * g).collect(),
            hess: self.hess.iter().map(|h| a * h).collect(),
        }
    }

    /// `f ∘ self` given `f(v), f'(v), f''(v)` at `v = self.value()`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let d = self.dim();
        let mut out = Jet::constant(d, f0, self.order);
        if self.order >= 1 {
            for i in 0..d {
                out.grad[i] = f1 * self.grad[i];
            }
        }
        if self.order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    out.hess[i * d + j] = f1 * self.hess[i * d + j] + f2 * self.grad[i] * self.grad[j];
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    /// Caller guarantees `value > 0` when order ≥ 1 and `value ≥ 0` otherwise.
    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        if self.order == 0 {
            return self.compose(s, 0.0, 0.0);
        }
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    /// Caller guarantees `value > 0`.
    pub fn ln(&self) -> Jet {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    /// Caller guarantees `value != 0`.
    pub fn recip(&self) -> Jet {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn powi(&self, n: i32) -> Jet {
        let v = self.value;
        let f0 = v.powi(n);
        let f1 = if n == 0 { 0.0 } else { n as f64 * v.powi(n - 1) };
        let f2 = if n == 0 || n == 1 {
            0.0
        } else {
            (n as f64) * ((n - 1) as f64) * v.powi(n - 2)
        };
        self.compose(f0, f1, f2)
    }

    /// Real power; caller guarantees `value > 0`.
    pub fn powf(&self, r: f64) -> Jet {
        let v = self.value;
        self.compose(v.powf(r), r * v.powf(r - 1.0), r * (r - 1.0) * v.powf(r - 2.0))
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet {
            order,
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a + b).collect(),
        };
        out.truncate();
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet {
            order,
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a - b).collect(),
        };
        out.truncate();
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let d = self.dim();
        let order = self.order.min(rhs.order);
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet::constant(d, a * b, order);
        if order >= 1 {
            for i in 0..d {
                out.grad[i] = self.grad[i] * b + a * rhs.grad[i];
            }
        }
        if order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    let k = i * d + j;
                    out.hess[k] = self.hess[k] * b
                        + a * rhs.hess[k]
                        + self.grad[i] * rhs.grad[j]
                        + self.grad[j] * rhs.grad[i];
                }
            }
        }
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for Jet {
    /// Panics on an empty iterator: the dimension of the zero jet is unknown.
    fn sum<I: Iterator<Item = Jet>>(mut iter: I) -> Jet {
        let first = iter.next().expect("sum of an empty jet sequence");
        iter.fold(first, |acc, j| &acc + &j)
    }
}
