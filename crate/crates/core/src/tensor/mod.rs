//! Dense multilinear arrays with explicit slot bookkeeping, plus the small
//! linear-algebra kernels the engine relies on.
//!
//! Components are stored row-major in *stored slot order*: the first slot
//! varies slowest. Each slot carries its own kind (contravariant or
//! covariant), so raising or lowering an index never reorders storage.
//!
//! Curvature is stored as `R^l_{ijk}` with slots `[Up, Down, Down, Down]`,
//! meaning `R(e_i, e_j) e_k = R^l_{ijk} e_l`.

mod eigen;
mod lstsq;

pub use eigen::{sym_eigen, SymEigen};
pub use lstsq::{lstsq, LstsqSolution};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("slot {slot} out of range for a tensor with {rank} slots")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot kind mismatch: expected {expected:?} at slot {slot}")]
    SlotKind { slot: usize, expected: Slot },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("component count {got} does not match dim^rank = {expected}")]
    ComponentCount { got: usize, expected: usize },
    #[error("metric is not invertible")]
    SingularMetric,
    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("operator is not self-adjoint w.r.t. the metric (residual {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("empty least-squares system")]
    EmptySystem,
}

/// Index kind of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Up,
    Down,
}

/// A dense tensor value at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorValue {
    dim: usize,
    slots: Vec<Slot>,
    components: Vec<f64>,
    symmetric: bool,
}

impl TensorValue {
    pub fn new(dim: usize, slots: Vec<Slot>, components: Vec<f64>) -> Result<Self, TensorError> {
        let expected = dim.pow(slots.len() as u32);
        if components.len() != expected {
            return Err(TensorError::ComponentCount {
                got: components.len(),
                expected,
            });
        }
        Ok(Self {
            dim,
            slots,
            components,
            symmetric: false,
        })
    }

    pub fn zeros(dim: usize, slots: Vec<Slot>) -> Self {
        let n = dim.pow(slots.len() as u32);
        Self {
            dim,
            slots,
            components: vec![0.0; n],
            symmetric: false,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            dim: 1,
            slots: Vec::new(),
            components: vec![value],
            symmetric: false,
        }
    }

    pub fn vector(v: &[f64]) -> Self {
        Self {
            dim: v.len(),
            slots: vec![Slot::Up],
            components: v.to_vec(),
            symmetric: false,
        }
    }

    pub fn covector(v: &[f64]) -> Self {
        Self {
            dim: v.len(),
            slots: vec![Slot::Down],
            components: v.to_vec(),
            symmetric: false,
        }
    }

    /// A (1,1) tensor from a matrix acting on column vectors: `T^i_j = m[(i, j)]`.
    pub fn from_operator(m: &DMatrix<f64>) -> Self {
        Self::from_matrix(m, [Slot::Up, Slot::Down])
    }

    pub fn from_matrix(m: &DMatrix<f64>, slots: [Slot; 2]) -> Self {
        let d = m.nrows();
        let mut components = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                components.push(m[(i, j)]);
            }
        }
        Self {
            dim: d,
            slots: slots.to_vec(),
            components,
            symmetric: false,
        }
    }

    /// A symmetric (0,2) tensor; the stored components are exactly symmetric.
    pub fn symmetric_02(m: &DMatrix<f64>) -> Self {
        let d = m.nrows();
        let mut components = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                components[i * d + j] = v;
                components[j * d + i] = v;
            }
        }
        Self {
            dim: d,
            slots: vec![Slot::Down, Slot::Down],
            components,
            symmetric: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    /// `(contravariant, covariant)` slot counts.
    pub fn valence(&self) -> (usize, usize) {
        let up = self.slots.iter().filter(|s| **s == Slot::Up).count();
        (up, self.slots.len() - up)
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.components[o] = v;
        self.symmetric = false;
    }

    /// Matrix view of a rank-2 tensor (`m[(i, j)] = T[i, j]`).
    pub fn to_matrix(&self) -> Option<DMatrix<f64>> {
        if self.rank() != 2 {
            return None;
        }
        let d = self.dim;
        Some(DMatrix::from_fn(d, d, |i, j| self.components[i * d + j]))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            slots: self.slots.clone(),
            components: self.components.iter().map(|v| a * v).collect(),
            symmetric: self.symmetric,
        }
    }

    /// `a * self + b * other`; slot layouts must agree.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self, TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::Dimension(self.dim, other.dim));
        }
        if self.slots != other.slots {
            return Err(TensorError::SlotKind {
                slot: 0,
                expected: self.slots.first().copied().unwrap_or(Slot::Up),
            });
        }
        Ok(Self {
            dim: self.dim,
            slots: self.slots.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            symmetric: self.symmetric && other.symmetric,
        })
    }

    fn check_slot(&self, slot: usize, kind: Slot) -> Result<(), TensorError> {
        if slot >= self.rank() {
            return Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            });
        }
        if self.slots[slot] != kind {
            return Err(TensorError::SlotKind {
                slot,
                expected: kind,
            });
        }
        Ok(())
    }
}

/// Iterate over all multi-indices of `rank` slots in dimension `dim`, row-major.
pub(crate) fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for s in (0..rank).rev() {
            idx[s] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

/// Trace over one contravariant and one covariant slot.
pub fn contract(t: &TensorValue, up_slot: usize, down_slot: usize) -> Result<TensorValue, TensorError> {
    t.check_slot(up_slot, Slot::Up)?;
    t.check_slot(down_slot, Slot::Down)?;
    let d = t.dim;
    let keep: Vec<usize> = (0..t.rank()).filter(|s| *s != up_slot && *s != down_slot).collect();
    let slots: Vec<Slot> = keep.iter().map(|&s| t.slots[s]).collect();
    let mut out = TensorValue::zeros(d, slots);
    let mut full = vec![0; t.rank()];
    for (flat, idx) in multi_indices(d, keep.len()).enumerate() {
        let mut sum = 0.0;
        for m in 0..d {
            for (pos, &s) in keep.iter().enumerate() {
                full[s] = idx[pos];
            }
            full[up_slot] = m;
            full[down_slot] = m;
            sum += t.get(&full);
        }
        out.components[flat] = sum;
    }
    if keep.is_empty() {
        return Ok(TensorValue::scalar(out.components[0]));
    }
    Ok(out)
}

fn move_index(t: &TensorValue, metric: &DMatrix<f64>, slot: usize, to: Slot) -> TensorValue {
    let d = t.dim;
    let mut out = t.clone();
    out.slots[slot] = to;
    out.symmetric = false;
    let mut src = vec![0; t.rank()];
    for (flat, idx) in multi_indices(d, t.rank()).enumerate() {
        src.copy_from_slice(&idx);
        let mut sum = 0.0;
        for b in 0..d {
            src[slot] = b;
            sum += metric[(idx[slot], b)] * t.get(&src);
        }
        out.components[flat] = sum;
    }
    out
}

fn metric_matrix(m: &TensorValue, kind: Slot) -> Result<DMatrix<f64>, TensorError> {
    if m.rank() != 2 || m.slots.iter().any(|s| *s != kind) {
        return Err(TensorError::SlotKind {
            slot: 0,
            expected: kind,
        });
    }
    let mat = m.to_matrix().expect("rank 2");
    if mat.clone().cholesky().is_none() {
        return Err(TensorError::NotPositiveDefinite);
    }
    Ok(mat)
}

/// Turn covariant `slot` into a contravariant one using the (2,0) inverse metric.
pub fn raise_index(t: &TensorValue, g_inv: &TensorValue, slot: usize) -> Result<TensorValue, TensorError> {
    t.check_slot(slot, Slot::Down)?;
    if g_inv.dim != t.dim {
        return Err(TensorError::Dimension(g_inv.dim, t.dim));
    }
    let m = metric_matrix(g_inv, Slot::Up)?;
    Ok(move_index(t, &m, slot, Slot::Up))
}

/// Turn contravariant `slot` into a covariant one using the (0,2) metric.
pub fn lower_index(t: &TensorValue, g: &TensorValue, slot: usize) -> Result<TensorValue, TensorError> {
    t.check_slot(slot, Slot::Up)?;
    if g.dim != t.dim {
        return Err(TensorError::Dimension(g.dim, t.dim));
    }
    let m = metric_matrix(g, Slot::Down)?;
    Ok(move_index(t, &m, slot, Slot::Down))
}

/// Inverse metric as a (2,0) tensor.
pub fn inverse_metric(g: &TensorValue) -> Result<TensorValue, TensorError> {
    let m = metric_matrix(g, Slot::Down)?;
    let inv = m.try_inverse().ok_or(TensorError::SingularMetric)?;
    let mut t = TensorValue::symmetric_02(&inv);
    t.slots = vec![Slot::Up, Slot::Up];
    Ok(t)
}

/// Pointwise (1,1) tensor in matrix form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    pub matrix: DMatrix<f64>,
    /// Name of the metric this operator is known to be self-adjoint for.
    pub symmetric_wrt_g: Option<String>,
}

impl LinearOperator {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            symmetric_wrt_g: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_tensor(&self) -> TensorValue {
        TensorValue::from_operator(&self.matrix)
    }

    pub fn from_tensor(t: &TensorValue) -> Result<Self, TensorError> {
        if t.slots != [Slot::Up, Slot::Down] {
            return Err(TensorError::SlotKind {
                slot: 0,
                expected: Slot::Up,
            });
        }
        Ok(Self::new(t.to_matrix().expect("rank 2")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_of_identity() {
        let id = TensorValue::from_operator(&DMatrix::identity(5, 5));
        let tr = contract(&id, 0, 1).unwrap();
        assert_eq!(tr.components(), &[5.0]);
        assert_eq!(tr.valence(), (0, 0));
    }

    #[test]
    fn contract_rejects_bad_slots() {
        let id = TensorValue::from_operator(&DMatrix::identity(3, 3));
        assert!(matches!(contract(&id, 1, 0), Err(TensorError::SlotKind { .. })));
        assert!(matches!(contract(&id, 0, 4), Err(TensorError::SlotOutOfRange { .. })));
    }

    #[test]
    fn operator_round_trip() {
        let m = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 - 3.5);
        let op = LinearOperator::new(m.clone());
        let back = LinearOperator::from_tensor(&op.to_tensor()).unwrap();
        assert_eq!(back.matrix, m);
    }

    #[test]
    fn symmetric_flag_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1 + 0.2, 0.3, 2.0]);
        let t = TensorValue::symmetric_02(&m);
        assert!(t.is_symmetric());
        assert_eq!(t.get(&[0, 1]), t.get(&[1, 0]));
    }

    #[test]
    fn partial_contraction_keeps_remaining_slots() {
        // T^a_{bc} = delta^a_b v_c  ->  contract(0,1) = d * v_c
        let d = 3;
        let v = [1.0, -2.0, 0.5];
        let mut t = TensorValue::zeros(d, vec![Slot::Up, Slot::Down, Slot::Down]);
        for a in 0..d {
            for c in 0..d {
                t.set(&[a, a, c], v[c]);
            }
        }
        let r = contract(&t, 0, 1).unwrap();
        assert_eq!(r.slots(), &[Slot::Down]);
        assert_eq!(r.components(), &[3.0, -6.0, 1.5]);
    }

    #[test]
    fn lowering_requires_spd() {
        let g = TensorValue::symmetric_02(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let v = TensorValue::vector(&[1.0, 1.0]);
        assert_eq!(lower_index(&v, &g, 0), Err(TensorError::NotPositiveDefinite));
    }
}
