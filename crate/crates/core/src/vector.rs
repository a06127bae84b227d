//! Finite-dimensional Euclidean vectors housing the fast state and the input.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real vector of runtime dimension with the standard inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVec(Vec<f64>);

impl StateVec {
    pub fn new(entries: Vec<f64>) -> Self {
        StateVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        StateVec(vec![0.0; dim])
    }

    /// Unit vector along axis `i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        StateVec(self.0.iter().map(|v| k * v).collect())
    }

    /// `self + k * other`, the update used by every Runge-Kutta stage.
    pub fn axpy(&self, k: f64, other: &StateVec) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        StateVec(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl From<Vec<f64>> for StateVec {
    fn from(v: Vec<f64>) -> Self {
        StateVec(v)
    }
}

impl<const N: usize> From<[f64; N]> for StateVec {
    fn from(v: [f64; N]) -> Self {
        StateVec(v.to_vec())
    }
}

impl Index<usize> for StateVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVec {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add<&StateVec> for &StateVec {
    type Output = StateVec;
    fn add(self, rhs: &StateVec) -> StateVec {
        self.axpy(1.0, rhs)
    }
}

impl Sub<&StateVec> for &StateVec {
    type Output = StateVec;
    fn sub(self, rhs: &StateVec) -> StateVec {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &StateVec {
    type Output = StateVec;
    fn mul(self, k: f64) -> StateVec {
        self.scale(k)
    }
}

impl Neg for &StateVec {
    type Output = StateVec;
    fn neg(self) -> StateVec {
        self.scale(-1.0)
    }
}

fn check_dims(a: &StateVec, b: &StateVec) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Euclidean dot product.
pub fn inner(a: &StateVec, b: &StateVec) -> Result<f64> {
    check_dims(a, b)?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum())
}

pub fn norm(a: &StateVec) -> f64 {
    a.norm()
}

/// Cosine of the angle between `a` and `b`; `None` when either vector is zero.
///
/// The result is clamped to `[-1, 1]` to absorb rounding in the quotient.
pub fn cosine(a: &StateVec, b: &StateVec) -> Result<Option<f64>> {
    let dot = inner(a, b)?;
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some((dot / denom).clamp(-1.0, 1.0)))
}
