use nalgebra::DMatrix;

use super::{ChartError, ChartField, Point};
use crate::expr::Jet;
use crate::tensor::{Slot, TensorValue};

/// Christoffel symbols of the second kind at a point, `Γ^k_{ij}` stored at `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    pub gamma: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.gamma[(k * d + i) * d + j]
    }

    /// Components of `∇_{∂_i} ∂_j`.
    pub fn nabla_coord(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.dim).map(|k| self.get(k, i, j)).collect()
    }

    /// `∇_X Y` for constant-coefficient inputs evaluated at the point
    /// (derivative terms supplied separately by the caller).
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    *o += self.get(k, i, j) * x[i] * y[j];
                }
            }
        }
        out
    }
}

fn idx2(d: usize, i: usize, j: usize) -> usize {
    i * d + j
}

fn idx3(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

/// Order-1 jets of `g^{ab}` from jets of `g_{ab}` (order ≥ 1).
pub fn metric_inverse_jets(g: &[Jet], d: usize) -> Result<Vec<Jet>, ChartError> {
    let order = g[0].order().min(1);
    let g0 = DMatrix::from_fn(d, d, |i, j| g[idx2(d, i, j)].value());
    let inv = g0.try_inverse().ok_or(ChartError::SingularMetric)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(ChartError::SingularMetric);
    }
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut grad = vec![0.0; d];
            if order >= 1 {
                for (k, gk) in grad.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for c in 0..d {
                        for e in 0..d {
                            s += inv[(a, c)] * g[idx2(d, c, e)].grad()[k] * inv[(e, b)];
                        }
                    }
                    *gk = -s;
                }
            }
            out.push(Jet::from_parts(order, inv[(a, b)], grad, vec![0.0; d * d]));
        }
    }
    Ok(out)
}

/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})` as jets one order
/// below the metric's.
pub fn connection_jets(g: &[Jet], d: usize) -> Result<Vec<Jet>, ChartError> {
    let ginv = metric_inverse_jets(g, d)?;
    let dg: Vec<Vec<Jet>> = (0..d)
        .map(|l| (0..d * d).map(|ij| g[ij].partial(l)).collect())
        .collect();
    // first kind: Γ_{l,ij}
    let mut first = Vec::with_capacity(d * d * d);
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                let s = &(&dg[i][idx2(d, j, l)] + &dg[j][idx2(d, i, l)]) - &dg[l][idx2(d, i, j)];
                first.push(s.scale(0.5));
            }
        }
    }
    let mut out = Vec::with_capacity(d * d * d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let s: Jet = (0..d)
                    .map(|l| &ginv[idx2(d, k, l)] * &first[idx3(d, l, i, j)])
                    .sum();
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// `R^l_{ijk} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`,
/// stored at `[l][i][j][k]`. Needs order-1 connection jets.
pub fn riemann_from_connection(gamma: &[Jet], d: usize) -> Vec<f64> {
    let gv = |k: usize, i: usize, j: usize| gamma[idx3(d, k, i, j)].value();
    let mut r = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = gamma[idx3(d, l, j, k)].grad()[i] - gamma[idx3(d, l, i, k)].grad()[j];
                    for m in 0..d {
                        v += gv(l, i, m) * gv(m, j, k) - gv(l, j, m) * gv(m, i, k);
                    }
                    r[((l * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    r
}

/// `(dω)_{ij} = ∂_i ω_j − ∂_j ω_i` (no ½).
pub fn exterior_derivative_jets(omega: &[Jet], d: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(&omega[j].partial(i) - &omega[i].partial(j));
        }
    }
    out
}

/// `[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket_jets(x: &[Jet], y: &[Jet], d: usize) -> Vec<Jet> {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| &(&x[i] * &y[k].partial(i)) - &(&y[i] * &x[k].partial(i)))
                .sum()
        })
        .collect()
}

/// `(L_X T)^i_j = X^k ∂_k T^i_j − T^k_j ∂_k X^i + T^i_k ∂_j X^k`.
pub fn lie_derivative_11_jets(t: &[Jet], x: &[Jet], d: usize) -> Vec<Jet> {
    let dx: Vec<Vec<Jet>> = (0..d).map(|k| x.iter().map(|c| c.partial(k)).collect()).collect();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let s: Jet = (0..d)
                .map(|k| {
                    let a = &x[k] * &t[idx2(d, i, j)].partial(k);
                    let b = &t[idx2(d, k, j)] * &dx[k][i];
                    let c = &t[idx2(d, i, k)] * &dx[j][k];
                    &(&a - &b) + &c
                })
                .sum();
            out.push(s);
        }
    }
    out
}

/// `(∇_k V)^i = ∂_k V^i + Γ^i_{km} V^m`, stored at `[k][i]`.
pub fn nabla_vector(v: &[Jet], gamma: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for k in 0..d {
        for i in 0..d {
            let mut s = v[i].grad()[k];
            for m in 0..d {
                s += gamma[idx3(d, i, k, m)] * v[m].value();
            }
            out[idx2(d, k, i)] = s;
        }
    }
    out
}

/// `(∇_k ω)_j = ∂_k ω_j − Γ^m_{kj} ω_m`, stored at `[k][j]`.
pub fn nabla_covector(w: &[Jet], gamma: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for k in 0..d {
        for j in 0..d {
            let mut s = w[j].grad()[k];
            for m in 0..d {
                s -= gamma[idx3(d, m, k, j)] * w[m].value();
            }
            out[idx2(d, k, j)] = s;
        }
    }
    out
}

/// `(∇_k T)^i_j = ∂_k T^i_j + Γ^i_{km} T^m_j − Γ^m_{kj} T^i_m`, stored at `[k][i][j]`.
pub fn nabla_operator(t: &[Jet], gamma: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = t[idx2(d, i, j)].grad()[k];
                for m in 0..d {
                    s += gamma[idx3(d, i, k, m)] * t[idx2(d, m, j)].value();
                    s -= gamma[idx3(d, m, k, j)] * t[idx2(d, i, m)].value();
                }
                out[idx3(d, k, i, j)] = s;
            }
        }
    }
    out
}

/// `(∇_k g)_{ij} = ∂_k g_{ij} − Γ^m_{ki} g_{mj} − Γ^m_{kj} g_{im}`, stored at `[k][i][j]`.
pub fn nabla_metric(g: &[Jet], gamma: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = g[idx2(d, i, j)].grad()[k];
                for m in 0..d {
                    s -= gamma[idx3(d, m, k, i)] * g[idx2(d, m, j)].value();
                    s -= gamma[idx3(d, m, k, j)] * g[idx2(d, i, m)].value();
                }
                out[idx3(d, k, i, j)] = s;
            }
        }
    }
    out
}

fn same_dim(a: &ChartField, b: &ChartField) -> Result<(), ChartError> {
    if a.dim() != b.dim() {
        return Err(ChartError::Dimension(a.dim(), b.dim()));
    }
    Ok(())
}

/// Exterior derivative of a 1-form, `(dω)(∂_i, ∂_j) = ∂_i ω_j − ∂_j ω_i`.
pub fn exterior_derivative(omega: &ChartField, p: &Point) -> Result<TensorValue, ChartError> {
    omega.expect_valence((0, 1))?;
    let w = omega.eval(p, 1)?;
    let d = omega.dim();
    let vals = exterior_derivative_jets(&w.comps, d).iter().map(Jet::value).collect();
    Ok(TensorValue::new(d, vec![Slot::Down, Slot::Down], vals).expect("d x d"))
}

pub fn lie_bracket(x: &ChartField, y: &ChartField, p: &Point) -> Result<TensorValue, ChartError> {
    x.expect_valence((1, 0))?;
    y.expect_valence((1, 0))?;
    same_dim(x, y)?;
    let (xj, yj) = (x.eval(p, 1)?, y.eval(p, 1)?);
    let v: Vec<f64> = lie_bracket_jets(&xj.comps, &yj.comps, x.dim()).iter().map(Jet::value).collect();
    Ok(TensorValue::vector(&v))
}

/// `(L_X T)(Y) = [X, TY] − T[X, Y]` for a (1,1) field `T`.
pub fn lie_derivative_11(t: &ChartField, x: &ChartField, p: &Point) -> Result<TensorValue, ChartError> {
    t.expect_valence((1, 1))?;
    x.expect_valence((1, 0))?;
    same_dim(t, x)?;
    let (tj, xj) = (t.eval(p, 1)?, x.eval(p, 1)?);
    let d = t.dim();
    let v = lie_derivative_11_jets(&tj.comps, &xj.comps, d).iter().map(Jet::value).collect();
    Ok(TensorValue::new(d, vec![Slot::Up, Slot::Down], v).expect("d x d"))
}

pub fn christoffel(g: &ChartField, p: &Point) -> Result<Christoffel, ChartError> {
    g.expect_valence((0, 2))?;
    let gj = g.eval(p, 1)?;
    let d = g.dim();
    let gamma = connection_jets(&gj.comps, d)?.iter().map(Jet::value).collect();
    Ok(Christoffel { dim: d, gamma })
}

/// Curvature `R^l_{ijk}` of the Levi-Civita connection, with
/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`.
pub fn riemann(g: &ChartField, p: &Point) -> Result<TensorValue, ChartError> {
    g.expect_valence((0, 2))?;
    let gj = g.eval(p, 2)?;
    let d = g.dim();
    let gamma = connection_jets(&gj.comps, d)?;
    let r = riemann_from_connection(&gamma, d);
    Ok(TensorValue::new(d, vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], r).expect("d^4"))
}

/// `∇_X T` for `T` of valence (1,0), (0,1), (1,1) or (0,2).
pub fn covariant_derivative(t: &ChartField, x: &ChartField, g: &ChartField, p: &Point) -> Result<TensorValue, ChartError> {
    x.expect_valence((1, 0))?;
    g.expect_valence((0, 2))?;
    same_dim(t, x)?;
    same_dim(t, g)?;
    let d = t.dim();
    let gamma: Vec<f64> = christoffel(g, p)?.gamma;
    let xv = x.eval(p, 0)?.values();
    let tj = t.eval(p, 1)?;
    let (full, rank) = match t.valence() {
        (1, 0) => (nabla_vector(&tj.comps, &gamma, d), 1),
        (0, 1) => (nabla_covector(&tj.comps, &gamma, d), 1),
        (1, 1) => (nabla_operator(&tj.comps, &gamma, d), 2),
        (0, 2) => (nabla_metric(&tj.comps, &gamma, d), 2),
        v => return Err(ChartError::UnsupportedValence(v)),
    };
    let block = d.pow(rank);
    let mut out = vec![0.0; block];
    for (k, xk) in xv.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(&full[k * block..(k + 1) * block]) {
            *o += xk * v;
        }
    }
    Ok(TensorValue::new(d, t.slots().to_vec(), out).expect("same layout"))
}
