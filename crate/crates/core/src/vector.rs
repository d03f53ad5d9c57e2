//! Dense parameter vectors and the federated aggregation rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense real vector holding model parameters or a parameter update.
///
/// All entries are finite; arithmetic helpers panic-free and dimension-checked
/// at the call sites that mix vectors of different origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(d: usize) -> Self {
        ParameterVector(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Validate finiteness and an expected dimension.
    pub fn check(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                got: self.dim(),
            });
        }
        if !self.is_finite() {
            return Err(Error::Config("parameter vector has non-finite entry".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ParameterVector) -> ParameterVector {
        debug_assert_eq!(self.dim(), other.dim());
        ParameterVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &ParameterVector) -> ParameterVector {
        debug_assert_eq!(self.dim(), other.dim());
        ParameterVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> ParameterVector {
        ParameterVector(self.0.iter().map(|a| a * s).collect())
    }

    /// self += s * other, in place.
    pub fn axpy(&mut self, s: f64, other: &ParameterVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn dot(&self, other: &ParameterVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        ParameterVector(v)
    }
}

/// Federated aggregation rule: `w_prev + sum_i weights[i] * updates[i]`.
///
/// Weights are the aggregation weights `p_i`; callers validate them through
/// [`crate::config::ProtocolConfig`]. Errors on any dimension mismatch.
pub fn aggregate(
    w_prev: &ParameterVector,
    updates: &[ParameterVector],
    weights: &[f64],
) -> Result<ParameterVector> {
    if updates.len() != weights.len() {
        return Err(Error::Config(format!(
            "{} updates but {} weights",
            updates.len(),
            weights.len()
        )));
    }
    let d = w_prev.dim();
    let mut out = w_prev.clone();
    for (u, &p) in updates.iter().zip(weights) {
        if u.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                got: u.dim(),
            });
        }
        out.axpy(p, u);
    }
    Ok(out)
}

/// Empirical covariance trace of a set of vectors about their mean,
/// normalized by the set size (population convention).
pub fn covariance_trace(vectors: &[ParameterVector]) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 0.0;
    }
    let d = vectors[0].dim();
    let mut mean = ParameterVector::zeros(d);
    for v in vectors {
        mean.axpy(1.0, v);
    }
    mean = mean.scale(1.0 / n as f64);
    let mut trace = 0.0;
    for v in vectors {
        let r = v.sub(&mean);
        trace += r.dot(&r);
    }
    trace / n as f64
}
