//! Christoffel symbols and curvature against a finite-difference oracle
//! that only evaluates metric values, plus closed-form curvature checks.

use kontact::chart::{christoffel, riemann, ChartField, Point};
use kontact::tensor::{contract, Slot};
use nalgebra::DMatrix;

fn metric(sources: &[&str]) -> ChartField {
    let d = (sources.len() as f64).sqrt() as usize;
    ChartField::parse("g", d, vec![Slot::Down, Slot::Down], sources).unwrap()
}

fn metric_at(g: &ChartField, x: &[f64]) -> DMatrix<f64> {
    let d = g.dim();
    let v = g.value_at(&Point::new(x.to_vec()).unwrap()).unwrap();
    DMatrix::from_row_slice(d, d, v.components())
}

/// `Γ^k_ij` at `x` by central differences of the metric values.
fn fd_gamma(g: &ChartField, x: &[f64], h: f64) -> Vec<f64> {
    let d = g.dim();
    let dg: Vec<DMatrix<f64>> = (0..d)
        .map(|m| {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[m] += h;
            xm[m] -= h;
            (metric_at(g, &xp) - metric_at(g, &xm)) / (2.0 * h)
        })
        .collect();
    let ginv = metric_at(g, x).try_inverse().unwrap();
    let mut out = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                out[(k * d + i) * d + j] = 0.5
                    * (0..d)
                        .map(|l| ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                        .sum::<f64>();
            }
        }
    }
    out
}

/// `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`.
fn fd_riemann(g: &ChartField, x: &[f64], h_outer: f64, h_inner: f64) -> Vec<f64> {
    let d = g.dim();
    let gam = fd_gamma(g, x, h_inner);
    let dgam: Vec<Vec<f64>> = (0..d)
        .map(|m| {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[m] += h_outer;
            xm[m] -= h_outer;
            let (p, q) = (fd_gamma(g, &xp, h_inner), fd_gamma(g, &xm, h_inner));
            p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h_outer)).collect()
        })
        .collect();
    let gi = |k: usize, i: usize, j: usize| gam[(k * d + i) * d + j];
    let mut out = vec![0.0; d.pow(4)];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = dgam[i][(l * d + j) * d + k] - dgam[j][(l * d + i) * d + k];
                    for m in 0..d {
                        v += gi(l, i, m) * gi(m, j, k) - gi(l, j, m) * gi(m, i, k);
                    }
                    out[((l * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    out
}

fn generic_metric() -> ChartField {
    metric(&[
        "1 + x1^2", "x1*x2", "0.1*sin(x3)",
        "x1*x2", "2 + cos(x3)*x2", "0.2*x1",
        "0.1*sin(x3)", "0.2*x1", "exp(x1)",
    ])
}

#[test]
fn christoffel_matches_difference_quotients() {
    let g = generic_metric();
    let x = [0.3, -0.2, 0.5];
    let gamma = christoffel(&g, &Point::new(x.to_vec()).unwrap()).unwrap();
    let fd = fd_gamma(&g, &x, 1e-5);
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = (gamma.get(k, i, j), fd[(k * 3 + i) * 3 + j]);
                assert!((a - b).abs() < 1e-8, "Gamma^{k}_{i}{j}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn riemann_matches_difference_quotients() {
    let g = generic_metric();
    let x = [0.3, -0.2, 0.5];
    let r = riemann(&g, &Point::new(x.to_vec()).unwrap()).unwrap();
    let fd = fd_riemann(&g, &x, 1e-3, 1e-4);
    let err = r.components().iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-5, "max deviation {err}");
}

#[test]
fn round_three_sphere_has_ricci_twice_metric() {
    // hyperspherical coordinates (a, b, c)
    let g = metric(&["1", "0", "0", "0", "sin(x1)^2", "0", "0", "0", "sin(x1)^2*sin(x2)^2"]);
    for x in [[0.7, 1.1, 0.3], [1.9, 0.4, -2.0]] {
        let p = Point::new(x.to_vec()).unwrap();
        let r = riemann(&g, &p).unwrap();
        let ric = contract(&r, 0, 1).unwrap();
        let gv = g.value_at(&p).unwrap();
        for (a, b) in ric.components().iter().zip(gv.components()) {
            assert!((a - 2.0 * b).abs() < 1e-12, "{a} vs {}", 2.0 * b);
        }
    }
}

#[test]
fn flat_metric_in_polar_coordinates_is_flat() {
    let g = metric(&["1", "0", "0", "0", "x1^2", "0", "0", "0", "1"]);
    let r = riemann(&g, &Point::new(vec![1.3, 0.4, -0.8]).unwrap()).unwrap();
    assert!(r.max_abs() < 1e-13);
}

#[test]
fn round_two_sphere_sectional_curvature() {
    // embed S² × R so the chart has odd dimension like every other test metric
    let g = metric(&["1", "0", "0", "0", "sin(x1)^2", "0", "0", "0", "1"]);
    let x = [0.9, 0.2, 0.0];
    let r = riemann(&g, &Point::new(x.to_vec()).unwrap()).unwrap();
    let s2 = x[0].sin().powi(2);
    // R(X,Y)Z = g(Y,Z)X − g(X,Z)Y, so R^1_{212} = −sin² a and R^2_{121} = −1
    assert!((r.get(&[0, 1, 0, 1]) + s2).abs() < 1e-13);
    assert!((r.get(&[1, 0, 1, 0]) + 1.0).abs() < 1e-13);
}
