//! Named residual checks and their aggregation over sample points.

use serde::{Deserialize, Serialize};

/// Which side of the tolerance passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `residual < tol` passes.
    Upper,
    /// `residual > tol` passes (non-degeneracy and positivity checks).
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub witness_point: Vec<f64>,
    pub bound: Bound,
}

impl Check {
    pub fn upper(name: impl Into<String>, residual: f64, tol: f64, point: &[f64]) -> Self {
        Self {
            check_name: name.into(),
            residual,
            tol,
            pass: residual < tol,
            witness_point: point.to_vec(),
            bound: Bound::Upper,
        }
    }

    pub fn lower(name: impl Into<String>, residual: f64, tol: f64, point: &[f64]) -> Self {
        Self {
            check_name: name.into(),
            residual,
            tol,
            pass: residual > tol,
            witness_point: point.to_vec(),
            bound: Bound::Lower,
        }
    }

    fn worse_than(&self, other: &Check) -> bool {
        match self.bound {
            Bound::Upper => !(self.residual <= other.residual),
            Bound::Lower => !(self.residual >= other.residual),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Fold per-point reports with identical check lists into one report
    /// holding, per check, the worst residual and the point it occurred at.
    pub fn worst_of(subject: impl Into<String>, reports: impl IntoIterator<Item = VerificationReport>) -> Self {
        let mut out = VerificationReport::new(subject);
        for r in reports {
            for c in r.checks {
                match out.checks.iter_mut().find(|o| o.check_name == c.check_name) {
                    Some(o) => {
                        if c.worse_than(o) {
                            *o = c;
                        }
                    }
                    None => out.checks.push(c),
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_point_is_kept() {
        let mut a = VerificationReport::new("a");
        a.push(Check::upper("x", 1e-3, 1e-2, &[0.0]));
        a.push(Check::lower("vol", 2.0, 1e-9, &[0.0]));
        let mut b = VerificationReport::new("b");
        b.push(Check::upper("x", 5e-2, 1e-2, &[1.0]));
        b.push(Check::lower("vol", 0.5, 1e-9, &[1.0]));
        let w = VerificationReport::worst_of("s", [a, b]);
        assert_eq!(w.get("x").unwrap().witness_point, vec![1.0]);
        assert!(!w.get("x").unwrap().pass);
        assert_eq!(w.get("vol").unwrap().residual, 0.5);
        assert!(!w.passed());
    }

    #[test]
    fn nan_counts_as_failure() {
        assert!(!Check::upper("n", f64::NAN, 1.0, &[]).pass);
        let w = VerificationReport::worst_of(
            "s",
            [
                VerificationReport { subject: "a".into(), checks: vec![Check::upper("n", 0.0, 1.0, &[])] },
                VerificationReport { subject: "b".into(), checks: vec![Check::upper("n", f64::NAN, 1.0, &[2.0])] },
            ],
        );
        assert!(!w.passed());
    }
}
