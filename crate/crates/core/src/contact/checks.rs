use nalgebra::{DMatrix, DVector};

use super::{derived_tensors, Backend, ContactError, ContactMetricStructure};
use crate::chart::jets::exterior_derivative_jets;
use crate::chart::{finite_difference_oracle, ChartField, Point};
use crate::report::{Check, VerificationReport};

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
}

fn d_eta_at(s: &ContactMetricStructure, p: &Point) -> Result<DMatrix<f64>, ContactError> {
    let d = s.dim();
    Ok(match &s.backend {
        Backend::Frame(m) => m.d_eta(),
        Backend::Chart(c) => {
            let eta = c.eta.eval(p, 1)?;
            let de: Vec<f64> = exterior_derivative_jets(&eta.comps, d).iter().map(|j| j.value()).collect();
            DMatrix::from_row_slice(d, d, &de)
        }
    })
}

/// Pointwise contact metric axioms. Residuals are largest absolute
/// components in the backend basis, so they stay meaningful when `g` is not
/// positive definite; the last two checks are lower bounds.
pub fn verify_axioms_at(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<VerificationReport, ContactError> {
    let (eta, xi, phi, g) = s.values_at(p)?;
    let d_eta = d_eta_at(s, p)?;
    let d = s.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let x = p.coords();
    let mut r = VerificationReport::new(format!("contact metric axioms of {}", s.name));
    r.push(Check::upper("eta(xi) = 1", (eta.dot(&xi) - 1.0).abs(), tol, x));
    r.push(Check::upper(
        "phi^2 = -I + eta (x) xi",
        max_abs(&(&phi * &phi + &id - &xi * eta.transpose())),
        tol,
        x,
    ));
    r.push(Check::upper("phi xi = 0", (&phi * &xi).amax(), tol, x));
    r.push(Check::upper("d eta = 2 g(., phi .)", max_abs(&(&d_eta - 2.0 * &g * &phi)), tol, x));
    r.push(Check::upper("g symmetric", max_abs(&(&g - g.transpose())), tol, x));
    let sym = (&g + g.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigenvalues().min();
    r.push(Check::lower("g positive definite (min eigenvalue)", min_eig, tol, x));
    // η ∧ (dη)^n on the coordinate basis is, up to a combinatorial factor,
    // the Pfaffian of the bordered matrix [[0, η], [−ηᵀ, dη]].
    let mut b = DMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        b[(0, i + 1)] = eta[i];
        b[(i + 1, 0)] = -eta[i];
        for j in 0..d {
            b[(i + 1, j + 1)] = d_eta[(i, j)];
        }
    }
    r.push(Check::lower("eta ^ (d eta)^n != 0 (|Pfaffian|)", b.determinant().abs().sqrt(), tol, x));
    Ok(r)
}

/// Axioms at every sample point, worst residual per check.
pub fn verify_axioms(s: &ContactMetricStructure, tol: f64) -> Result<VerificationReport, ContactError> {
    let subject = format!("contact metric axioms of {}", s.name);
    s.over_samples(&subject, |p| verify_axioms_at(s, p, tol))
}

/// Identities tying `∇φ`, `∇_ξ h`, `L_ξ h` and `l` together on any contact
/// metric manifold. Norms are Frobenius norms in an orthonormal frame.
pub fn check_structural_identities(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<VerificationReport, ContactError> {
    let t = derived_tensors(s, p)?;
    let f = &t.frame;
    let (phi, h, l) = (&t.phi, &t.h, &t.l);
    let h2 = h * h;
    let x = p.coords();
    let mut r = VerificationReport::new(format!("structural identities of {}", s.name));
    r.push(Check::upper(
        "nabla_xi h = phi - h^2 phi - phi l",
        f.op_norm(&(&t.nabla_xi_h - (phi - &h2 * phi - phi * l))),
        tol,
        x,
    ));
    r.push(Check::upper(
        "phi l phi - l = 2(h^2 + phi^2)",
        f.op_norm(&(phi * l * phi - l - 2.0 * (&h2 + phi * phi))),
        tol,
        x,
    ));
    r.push(Check::upper(
        "L_xi h = nabla_xi h + 2 phi h + 2 phi h^2",
        f.op_norm(&(&t.lie_xi_h - (&t.nabla_xi_h + 2.0 * phi * h + 2.0 * phi * &h2))),
        tol,
        x,
    ));
    let d = t.dim();
    let mut nabla_phi_xi = DMatrix::zeros(d, d);
    for (a, np) in t.nabla_phi.iter().enumerate() {
        nabla_phi_xi.set_column(a, &(np * &t.xi));
    }
    r.push(Check::upper(
        "(nabla_X phi) xi = -X + eta(X) xi - hX",
        f.op_norm(&(nabla_phi_xi + t.projector() + h)),
        tol,
        x,
    ));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SasakianReport {
    pub report: VerificationReport,
    /// Both characterisations agree (both pass, or both clearly fail).
    pub equivalent: bool,
}

impl SasakianReport {
    pub fn is_sasakian(&self) -> bool {
        self.report.passed()
    }
}

/// Sasakian test by the covariant derivative of φ and by curvature,
/// maximised over pairs of orthonormal frame vectors.
pub fn check_sasakian(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<SasakianReport, ContactError> {
    let t = derived_tensors(s, p)?;
    let f = &t.frame;
    let d = t.dim();
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for i in 0..d {
        let x = f.vector(i);
        let nphi = t.nabla_phi_along(&x);
        let eta_x = t.eta.dot(&x);
        for j in 0..d {
            let y = f.vector(j);
            let eta_y = t.eta.dot(&y);
            let gxy = (x.transpose() * &t.g * &y)[(0, 0)];
            let lhs: DVector<f64> = &nphi * &y;
            a = a.max(f.vec_norm(&(lhs - (&t.xi * gxy - &x * eta_y))));
            let rxy = t.curvature(&x, &y, &t.xi);
            b = b.max(f.vec_norm(&(rxy - (&x * eta_y - &y * eta_x))));
        }
    }
    let pt = p.coords();
    let mut report = VerificationReport::new(format!("Sasakian conditions of {}", s.name));
    report.push(Check::upper("(nabla_X phi)Y = g(X,Y) xi - eta(Y) X", a, tol, pt));
    report.push(Check::upper("R(X,Y) xi = eta(Y) X - eta(X) Y", b, tol, pt));
    let equivalent = (a < tol) == (b < tol) || a.max(b) < 10.0 * tol;
    Ok(SasakianReport { report, equivalent })
}

/// K-contact means ξ is Killing, equivalently `h = 0`; then `l` is the
/// projection onto the contact distribution.
pub fn check_kcontact(s: &ContactMetricStructure, p: &Point, tol: f64) -> Result<VerificationReport, ContactError> {
    let t = derived_tensors(s, p)?;
    let f = &t.frame;
    let pt = p.coords();
    let mut r = VerificationReport::new(format!("K-contact conditions of {}", s.name));
    r.push(Check::upper("h = 0", f.op_norm(&t.h), tol, pt));
    r.push(Check::upper("l = I - eta (x) xi", f.op_norm(&(&t.l - t.projector())), tol, pt));
    Ok(r)
}

/// Jets of every chart field against central differences with `step`;
/// residual is the largest absolute difference in value, gradient or
/// Hessian. Frame structures have constant data and yield an empty report.
pub fn check_oracle(s: &ContactMetricStructure, p: &Point, step: f64, tol: f64) -> Result<VerificationReport, ContactError> {
    s.check_point(p)?;
    let mut r = VerificationReport::new(format!("jet vs finite-difference oracle for {}", s.name));
    let Backend::Chart(c) = &s.backend else {
        return Ok(r);
    };
    let fields: [(&str, &ChartField); 4] = [("eta", &c.eta), ("xi", &c.xi), ("phi", &c.phi), ("g", &c.g)];
    let d = s.dim();
    for (name, f) in fields {
        let exact = f.eval(p, 2)?;
        let approx = finite_difference_oracle(f, p, step)?;
        let mut worst: f64 = 0.0;
        for (a, b) in exact.comps.iter().zip(&approx) {
            worst = worst.max((a.value() - b.value()).abs());
            for i in 0..d {
                worst = worst.max((a.grad()[i] - b.grad()[i]).abs());
                for j in 0..d {
                    worst = worst.max((a.hess(i, j) - b.hess(i, j)).abs());
                }
            }
        }
        r.push(Check::upper(format!("oracle: {name} jets"), worst, tol, p.coords()));
    }
    Ok(r)
}
