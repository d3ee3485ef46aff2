//! Detection of periodic orbits by return to the initial state.

use serde::{Deserialize, Serialize};

use crate::error::{singular, Error, Result};
use crate::geometry::PhaseState;
use crate::systems::SystemSpec;

use super::integrate::{integrate, Settings, Trajectory};

/// Default return threshold in normalized phase-space distance.
pub const RETURN_DELTA: f64 = 1e-4;

/// Radius beyond which an orbit in E³ or H³ counts as escaping.
pub const ESCAPE_RADIUS: f64 = 100.0;

const ORBIT_TOL: f64 = 1e-12;
const REFINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub is_closed: bool,
    /// Smallest normalized distance to the initial state after the first
    /// radial oscillation.
    pub return_distance: f64,
    /// Time of the first return within `delta`, or of the closest approach.
    pub period_estimate: f64,
}

/// Per-coordinate scales from the ranges covered by the orbit; the φ range
/// is capped at 2π and degenerate ranges get scale 1.
fn coordinate_scales(traj: &Trajectory) -> [f64; 6] {
    let mut lo = [f64::INFINITY; 6];
    let mut hi = [f64::NEG_INFINITY; 6];
    for s in &traj.states {
        for (i, v) in s.as_array().iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
    }
    let mut out = [1.0; 6];
    for i in 0..6 {
        let mut range = hi[i] - lo[i];
        if i == 2 {
            range = range.min(std::f64::consts::TAU);
        }
        if range > 1e-8 {
            out[i] = range;
        }
    }
    out
}

fn distance(a: &PhaseState, b: &PhaseState, scales: &[f64; 6]) -> f64 {
    let (x, y) = (a.as_array(), b.as_array());
    let mut sum = 0.0;
    for i in 0..6 {
        let mut d = x[i] - y[i];
        if i == 2 {
            d = (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        }
        sum += (d / scales[i]).powi(2);
    }
    sum.sqrt()
}

fn ensure_complete(traj: &Trajectory) -> Result<()> {
    match &traj.truncated {
        Some(why) => Err(singular(format!("orbit integration truncated: {why}"))),
        None => Ok(()),
    }
}

fn state_at(spec: &SystemSpec, from: &PhaseState, dt: f64, settings: &Settings) -> Result<PhaseState> {
    if dt <= 0.0 {
        return Ok(*from);
    }
    let traj = integrate(spec, from, dt, settings)?;
    ensure_complete(&traj)?;
    Ok(traj.last().1)
}

/// Integrates from `s0` up to `t_max` at tolerance 1e−12 and looks for a
/// return within `delta` of `s0` after `p_r` has changed sign twice.
pub fn closed_orbit_check_with(spec: &SystemSpec, s0: &PhaseState, t_max: f64, delta: f64) -> Result<OrbitReport> {
    let settings = Settings::adaptive(ORBIT_TOL);
    let traj = integrate(spec, s0, t_max, &settings)?;
    if spec.kappa.value() <= 0.0 {
        if let Some(i) = traj.states.iter().position(|s| s.q.r > ESCAPE_RADIUS) {
            return Err(Error::Unbounded { t: traj.times[i], r: traj.states[i].q.r });
        }
    }
    ensure_complete(&traj)?;

    let scales = coordinate_scales(&traj);
    let d: Vec<f64> = traj.states.iter().map(|s| distance(s, s0, &scales)).collect();

    // first index after two sign changes of p_r
    let mut changes = 0;
    let mut start = None;
    for i in 1..traj.len() {
        let (a, b) = (traj.states[i - 1].p_r, traj.states[i].p_r);
        if a * b < 0.0 || (a != 0.0 && b == 0.0) {
            changes += 1;
            if changes == 2 {
                start = Some(i);
                break;
            }
        }
    }
    let start = start.ok_or(Error::NoReturn { t_max })?;

    let mut best: Option<(f64, f64)> = None;
    for i in start.max(1)..traj.len().saturating_sub(1) {
        if !(d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
            continue;
        }
        let (t, dist) = refine(spec, &traj, i, s0, &scales, &settings)?;
        if dist < delta {
            return Ok(OrbitReport { is_closed: true, return_distance: dist, period_estimate: t });
        }
        if best.is_none_or(|(_, b)| dist < b) {
            best = Some((t, dist));
        }
    }
    match best {
        Some((t, dist)) => Ok(OrbitReport { is_closed: false, return_distance: dist, period_estimate: t }),
        None => Err(Error::NoReturn { t_max }),
    }
}

pub fn closed_orbit_check(spec: &SystemSpec, s0: &PhaseState, t_max: f64) -> Result<OrbitReport> {
    closed_orbit_check_with(spec, s0, t_max, RETURN_DELTA)
}

/// Golden-section search for the minimum of the distance on
/// `[t_{i−1}, t_{i+1}]`, re-integrating from the stored state at `t_{i−1}`.
fn refine(
    spec: &SystemSpec,
    traj: &Trajectory,
    i: usize,
    s0: &PhaseState,
    scales: &[f64; 6],
    settings: &Settings,
) -> Result<(f64, f64)> {
    let base_t = traj.times[i - 1];
    let base = traj.states[i - 1];
    let f = |t: f64| -> Result<f64> { Ok(distance(&state_at(spec, &base, t - base_t, settings)?, s0, scales)) };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (base_t, traj.times[i + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    while b - a > REFINE_TOL * b.abs().max(1.0) {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e)?;
        }
    }
    let mut best = if fc < fe { (c, fc) } else { (e, fe) };
    if d_at(traj, i, s0, scales) < best.1 {
        best = (traj.times[i], d_at(traj, i, s0, scales));
    }
    Ok(best)
}

fn d_at(traj: &Trajectory, i: usize, s0: &PhaseState, scales: &[f64; 6]) -> f64 {
    distance(&traj.states[i], s0, scales)
}
