//! Numerical rank of a family of gradients, for functional independence.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::PhaseState;
use crate::jet::DIM;
use crate::observables::PhaseFunction;

/// Default relative threshold on the singular values.
pub const RANK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Rank of the `n × 6` matrix of analytic gradients, each row scaled to unit
/// length: the number of singular values above `threshold` times the largest.
/// Row scaling leaves the rank unchanged but keeps quartic integrals from
/// swamping quadratic ones.
pub fn independence_rank(observables: &[&dyn PhaseFunction], s: &PhaseState, threshold: f64) -> Result<RankReport> {
    let mut m = DMatrix::<f64>::zeros(observables.len(), DIM);
    for (i, f) in observables.iter().enumerate() {
        let g = f.gradient(s)?;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm = if norm > 0.0 { norm } else { 1.0 };
        for (j, v) in g.iter().enumerate() {
            m[(i, j)] = *v / norm;
        }
    }
    let mut singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 { singular_values.iter().filter(|&&v| v > threshold * top).count() } else { 0 };
    Ok(RankReport { rank, singular_values })
}
