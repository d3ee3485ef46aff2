//! Drift of phase-space functions along a trajectory.

use serde::{Deserialize, Serialize};

use crate::observables::PhaseFunction;

use super::integrate::Trajectory;

/// Lower bound on the denominator of the relative drift.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationRow {
    pub name: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    /// `max_abs_drift / max(|initial|, RELATIVE_FLOOR)`.
    pub max_rel_drift: f64,
    /// Samples at which the function could not be evaluated.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub samples: usize,
    pub rows: Vec<ConservationRow>,
}

impl ConservationReport {
    pub fn row(&self, name: &str) -> Option<&ConservationRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

pub fn conservation_report(traj: &Trajectory, observables: &[&dyn PhaseFunction]) -> ConservationReport {
    let rows = observables
        .iter()
        .map(|f| {
            let mut initial = f64::NAN;
            let mut max_abs_drift: f64 = 0.0;
            let mut failures = 0;
            for s in &traj.states {
                match f.value(s) {
                    Ok(v) if v.is_finite() => {
                        if initial.is_nan() {
                            initial = v;
                        }
                        max_abs_drift = max_abs_drift.max((v - initial).abs());
                    }
                    _ => failures += 1,
                }
            }
            ConservationRow {
                name: f.label(),
                initial,
                max_abs_drift,
                max_rel_drift: max_abs_drift / initial.abs().max(RELATIVE_FLOOR),
                failures,
            }
        })
        .collect();
    ConservationReport { samples: traj.states.len(), rows }
}
