use crate::chart::{ChartError, ChartField};
use crate::contact::{ChartStructure, ContactError, ContactMetricStructure};
use crate::homogeneous::LieFrameModel;
use crate::tensor::Slot;

use super::RegistryError;

/// Coordinate names for `(x^1..x^n, y^1..y^n, z)` on `R^{2n+1}`.
struct Darboux {
    n: usize,
}

impl Darboux {
    fn d(&self) -> usize {
        2 * self.n + 1
    }
    fn y(&self, i: usize) -> String {
        format!("x{}", self.n + i + 1)
    }
    fn z(&self) -> String {
        format!("x{}", 2 * self.n + 1)
    }

    /// `η = ½(dz − Σ y^i dx^i)` and `ξ = 2∂_z`.
    fn eta_xi(&self) -> Result<(ChartField, ChartField), ChartError> {
        let d = self.d();
        let mut eta = vec!["0".to_string(); d];
        for i in 0..self.n {
            eta[i] = format!("-(1/2)*{}", self.y(i));
        }
        eta[d - 1] = "1/2".into();
        let mut xi = vec!["0".to_string(); d];
        xi[d - 1] = "2".into();
        Ok((
            ChartField::parse("eta", d, vec![Slot::Down], &eta)?,
            ChartField::parse("xi", d, vec![Slot::Up], &xi)?,
        ))
    }

    fn field(&self, name: &str, slots: Vec<Slot>, f: impl Fn(usize, usize) -> String) -> Result<ChartField, ChartError> {
        let d = self.d();
        let comps: Vec<String> = (0..d * d).map(|k| f(k / d, k % d)).collect();
        ChartField::parse(name, d, slots, &comps)
    }
}

fn check_n(n: usize) -> Result<(), RegistryError> {
    if n < 1 {
        return Err(RegistryError::InvalidParameter(format!("n must be at least 1, got {n}")));
    }
    Ok(())
}

fn wrap(e: ChartError) -> RegistryError {
    RegistryError::Contact(ContactError::Chart(e))
}

/// The standard Sasakian structure on `R^{2n+1}` with
/// `g = η⊗η + ¼ Σ (dx^i² + dy^i²)`.
pub fn darboux_sasakian(n: usize) -> Result<ContactMetricStructure, RegistryError> {
    check_n(n)?;
    let dx = Darboux { n };
    let (eta, xi) = dx.eta_xi().map_err(wrap)?;
    let d = dx.d();
    let phi = dx
        .field("phi", vec![Slot::Up, Slot::Down], |r, c| {
            if r < n && c == n + r {
                "1".into()
            } else if r >= n && r < 2 * n && c == r - n {
                "-1".into()
            } else if r == d - 1 && c >= n && c < 2 * n {
                dx.y(c - n)
            } else {
                "0".into()
            }
        })
        .map_err(wrap)?;
    let g = dx
        .field("g", vec![Slot::Down, Slot::Down], |r, c| {
            let z = d - 1;
            match (r < n, c < n) {
                _ if r == z && c == z => "1/4".into(),
                (true, true) => {
                    let yy = format!("{}*{}", dx.y(r), dx.y(c));
                    if r == c {
                        format!("(1/4)*(1 + {yy})")
                    } else {
                        format!("(1/4)*{yy}")
                    }
                }
                (true, false) if c == z => format!("-(1/4)*{}", dx.y(r)),
                (false, true) if r == z => format!("-(1/4)*{}", dx.y(c)),
                _ if r == c => "1/4".into(),
                _ => "0".into(),
            }
        })
        .map_err(wrap)?;
    let data = ChartStructure::new(eta, xi, phi, g)?;
    Ok(ContactMetricStructure::chart(format!("darboux-sasakian-n{n}"), data)?)
}

/// Weakly `(0, 0)` structure on `R^{2n+1}` with the same contact form and
/// metric `¼[[δ + yyᵀ + z²δ, zδ, −y], [zδ, δ, 0], [−yᵀ, 0, 1]]`.
pub fn darboux_weak(n: usize) -> Result<ContactMetricStructure, RegistryError> {
    check_n(n)?;
    let dx = Darboux { n };
    let (eta, xi) = dx.eta_xi().map_err(wrap)?;
    let d = dx.d();
    let z = dx.z();
    let phi = dx
        .field("phi", vec![Slot::Up, Slot::Down], |r, c| {
            let last = d - 1;
            if r == last {
                return match c {
                    c if c < n => format!("{}*{z}", dx.y(c)),
                    c if c < 2 * n => dx.y(c - n),
                    _ => "0".into(),
                };
            }
            if c == last {
                return "0".into();
            }
            let (ri, rx) = (r % n, r < n);
            let (ci, cx) = (c % n, c < n);
            if ri != ci {
                return "0".into();
            }
            match (rx, cx) {
                (true, true) => z.clone(),
                (true, false) => "1".into(),
                (false, true) => format!("-({z}^2 + 1)"),
                (false, false) => format!("-{z}"),
            }
        })
        .map_err(wrap)?;
    let g = dx
        .field("g", vec![Slot::Down, Slot::Down], |r, c| {
            let last = d - 1;
            if r == last || c == last {
                return match (r == last, c == last) {
                    (true, true) => "1/4".into(),
                    (true, false) if c < n => format!("-(1/4)*{}", dx.y(c)),
                    (false, true) if r < n => format!("-(1/4)*{}", dx.y(r)),
                    _ => "0".into(),
                };
            }
            let (ri, rx) = (r % n, r < n);
            let (ci, cx) = (c % n, c < n);
            match (rx, cx) {
                (true, true) => {
                    let yy = format!("{}*{}", dx.y(ri), dx.y(ci));
                    if ri == ci {
                        format!("(1/4)*(1 + {yy} + {z}^2)")
                    } else {
                        format!("(1/4)*{yy}")
                    }
                }
                (true, false) | (false, true) if ri == ci => format!("(1/4)*{z}"),
                (false, false) if ri == ci => "1/4".into(),
                _ => "0".into(),
            }
        })
        .map_err(wrap)?;
    let data = ChartStructure::new(eta, xi, phi, g)?;
    Ok(ContactMetricStructure::chart(format!("darboux-weak-n{n}"), data)?)
}

pub fn lie_family(c1: f64, c2: f64) -> Result<ContactMetricStructure, RegistryError> {
    if !c1.is_finite() || !c2.is_finite() {
        return Err(RegistryError::InvalidParameter("c1 and c2 must be finite".into()));
    }
    Ok(ContactMetricStructure::frame(
        format!("lie({c1},{c2})"),
        LieFrameModel::lie_family(c1, c2),
    )?)
}

/// Resolve a built-in name: `darboux-sasakian-n<k>`, `darboux-weak-n<k>`
/// or `lie(<c1>,<c2>)`.
pub fn builtin(name: &str) -> Result<ContactMetricStructure, RegistryError> {
    let unknown = || RegistryError::UnknownBuiltin(name.to_string());
    let parse_n = |rest: &str| rest.parse::<usize>().map_err(|_| unknown());
    if let Some(rest) = name.strip_prefix("darboux-sasakian-n") {
        return darboux_sasakian(parse_n(rest)?);
    }
    if let Some(rest) = name.strip_prefix("darboux-weak-n") {
        return darboux_weak(parse_n(rest)?);
    }
    if let Some(args) = name.strip_prefix("lie(").and_then(|r| r.strip_suffix(')')) {
        let (a, b) = args.split_once(',').ok_or_else(unknown)?;
        let c1 = a.trim().parse::<f64>().map_err(|_| unknown())?;
        let c2 = b.trim().parse::<f64>().map_err(|_| unknown())?;
        return lie_family(c1, c2);
    }
    Err(unknown())
}

/// Names accepted by [`builtin`] that ship with the crate.
pub const BUILTIN_NAMES: [&str; 5] = [
    "darboux-sasakian-n1",
    "darboux-sasakian-n2",
    "darboux-weak-n1",
    "darboux-weak-n2",
    "lie(4,0)",
];
