use rayon::prelude::*;
use serde::Serialize;

use super::{lie_family, RegistryError};
use crate::boeckx::{boeckx_invariant, Regime};
use crate::kmu::classify_structure;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c1: f64,
    pub c2: f64,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub lambda: f64,
    pub i_m: Option<f64>,
    pub regime: Regime,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "c1,c2,kappa,mu,lambda,I,regime";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{}",
            self.c1,
            self.c2,
            self.kappa,
            opt(self.mu),
            self.lambda,
            opt(self.i_m),
            self.regime.as_str()
        )
    }
}

/// Fit and classify every member of the Lie family on a grid, row-major
/// in `c1`.
pub fn sweep_lie_family(c1s: &[f64], c2s: &[f64], tol: f64) -> Result<Vec<SweepRow>, RegistryError> {
    let grid: Vec<(f64, f64)> = c1s.iter().flat_map(|&a| c2s.iter().map(move |&b| (a, b))).collect();
    grid.par_iter()
        .map(|&(c1, c2)| {
            let s = lie_family(c1, c2)?;
            let cls = classify_structure(&s, tol).map_err(|e| RegistryError::Format(e.to_string()))?;
            let b = boeckx_invariant(cls.kappa, cls.mu.unwrap_or(0.0)).map_err(|e| RegistryError::Format(e.to_string()))?;
            Ok(SweepRow {
                c1,
                c2,
                kappa: cls.kappa,
                mu: cls.mu,
                lambda: b.lambda,
                i_m: b.i_m,
                regime: b.regime,
            })
        })
        .collect()
}
