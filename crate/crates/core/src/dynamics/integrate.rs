//! Integrators for Hamilton's equations: classical RK4 with a fixed step, the
//! Dormand–Prince 5(4) pair with PI step control, and the implicit midpoint
//! rule.
//!
//! A step that fails (the right-hand side hits a singularity, or the new
//! state leaves the admissible region) is rejected. The adaptive method
//! retries with a smaller step down to `dt_min`; all methods then stop and
//! return the trajectory so far with `truncated` set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Chart, PhaseState};
use crate::observables::{Axis, Frame};
use crate::systems::SystemSpec;

pub type State = [f64; 6];

/// Smallest step the adaptive method may take before giving up.
pub const DT_MIN: f64 = 1e-12;

/// Convergence threshold of the implicit-midpoint fixed-point iteration.
pub const MIDPOINT_TOL: f64 = 1e-13;

pub const MIDPOINT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
    ImplicitMidpoint,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4Fixed => "rk4_fixed",
            Method::Rk45Adaptive => "rk45_adaptive",
            Method::ImplicitMidpoint => "implicit_midpoint",
        }
    }

    pub fn from_name(name: &str) -> Result<Method> {
        [Method::Rk4Fixed, Method::Rk45Adaptive, Method::ImplicitMidpoint]
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownName(format!("method '{name}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub method: Method,
    /// Local tolerance of the adaptive method (absolute and relative).
    pub tol: f64,
    /// Step of the fixed-step methods; first trial step of the adaptive one
    /// when positive.
    pub dt: f64,
    pub max_steps: usize,
}

impl Settings {
    pub fn adaptive(tol: f64) -> Self {
        Settings { method: Method::Rk45Adaptive, tol, dt: 0.0, max_steps: 10_000_000 }
    }

    pub fn fixed(method: Method, dt: f64) -> Self {
        Settings { method, tol: 0.0, dt, max_steps: 100_000_000 }
    }

    fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk45Adaptive if !(self.tol > 0.0 && self.tol.is_finite()) => {
                Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)))
            }
            Method::Rk4Fixed | Method::ImplicitMidpoint if !(self.dt > 0.0 && self.dt.is_finite()) => {
                Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)))
            }
            _ => Ok(()),
        }
    }
}

impl Default for Settings {
    fn default() -> Self {
        Settings::adaptive(1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub dt: f64,
    /// Weighted local error estimate (adaptive method only).
    pub local_error: Option<f64>,
    /// Rejected trial steps before this one was accepted.
    pub rejected: usize,
}

/// Output of [`integrate_ode`]: `times[0]` and `states[0]` are the initial data,
/// `diagnostics[i]` describes the step that produced `states[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub truncated: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Reason the run stopped before `t_end`, if it did.
    pub truncated: Option<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, PhaseState) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }
}

/// A first-order system on six coordinates.
pub trait OdeSystem {
    fn rhs(&self, y: &State) -> Result<State>;

    /// Whether a step from `from` may land on `to`.
    fn admissible(&self, _from: &State, _to: &State) -> Result<()> {
        Ok(())
    }
}

/// Hamilton's equations of a system in geodesic polar coordinates.
pub struct Hamilton<'a>(pub &'a SystemSpec);

impl OdeSystem for Hamilton<'_> {
    fn rhs(&self, y: &State) -> Result<State> {
        self.0.hamilton_rhs(&PhaseState::from_array(*y))
    }

    // Rejects steps that leave the domain or jump across a coordinate plane
    // guarded by a nonzero k_i/x_i² term.
    fn admissible(&self, from: &State, to: &State) -> Result<()> {
        let spec = self.0;
        let b = PhaseState::from_array(*to);
        b.validate(spec.kappa)?;
        if spec.couplings.has_nonlinear_terms() {
            let a = PhaseState::from_array(*from);
            let fa = Frame::new(spec.kappa, &a);
            let fb = Frame::new(spec.kappa, &b);
            for ax in Axis::ALL {
                if spec.couplings.nonlinear(ax) != 0.0 && fa.coord(ax).value * fb.coord(ax).value <= 0.0 {
                    return Err(crate::error::singular(format!("step crosses the plane x_{} = 0", ax.number())));
                }
            }
        }
        Ok(())
    }
}

/// Hamilton's equations in one of the alternative radial charts.
pub struct ChartHamilton<'a> {
    pub spec: &'a SystemSpec,
    pub chart: Chart,
}

impl OdeSystem for ChartHamilton<'_> {
    fn rhs(&self, y: &State) -> Result<State> {
        self.spec.chart_rhs(self.chart, y)
    }

    fn admissible(&self, _from: &State, to: &State) -> Result<()> {
        if to[0] <= 0.0 || to[1] <= 0.0 || to[1] >= std::f64::consts::PI || to.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::singular(format!("chart state {to:?} left the domain")));
        }
        Ok(())
    }
}

pub fn integrate(spec: &SystemSpec, s0: &PhaseState, t_end: f64, settings: &Settings) -> Result<Trajectory> {
    s0.validate(spec.kappa)?;
    let sol = integrate_ode(&Hamilton(spec), s0.as_array(), t_end, settings)?;
    Ok(Trajectory {
        times: sol.times,
        states: sol.states.into_iter().map(PhaseState::from_array).collect(),
        diagnostics: sol.diagnostics,
        truncated: sol.truncated,
    })
}

pub fn integrate_ode(sys: &dyn OdeSystem, y0: State, t_end: f64, settings: &Settings) -> Result<Solution> {
    settings.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
    }
    sys.rhs(&y0)?;
    match settings.method {
        Method::Rk4Fixed => fixed_steps(sys, y0, t_end, settings, rk4_step),
        Method::ImplicitMidpoint => fixed_steps(sys, y0, t_end, settings, midpoint_step),
        Method::Rk45Adaptive => dormand_prince(sys, y0, t_end, settings),
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..6 {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn rk4_step(sys: &dyn OdeSystem, y: &State, h: f64) -> Result<State> {
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = sys.rhs(&axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = sys.rhs(&axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]))
}

/// `y1 = y0 + h f((y0 + y1)/2)` by fixed-point iteration.
fn midpoint_step(sys: &dyn OdeSystem, y: &State, h: f64) -> Result<State> {
    let mut next = axpy(y, h, &[(1.0, &sys.rhs(y)?)]);
    let mut last_update = f64::INFINITY;
    for _ in 0..MIDPOINT_MAX_ITER {
        let mut mid = [0.0; 6];
        for i in 0..6 {
            mid[i] = 0.5 * (y[i] + next[i]);
        }
        let cand = axpy(y, h, &[(1.0, &sys.rhs(&mid)?)]);
        last_update = (0..6).map(|i| (cand[i] - next[i]).abs() / (1.0 + cand[i].abs())).fold(0.0, f64::max);
        next = cand;
        if last_update < MIDPOINT_TOL {
            return Ok(next);
        }
    }
    Err(Error::NonConvergence { iterations: MIDPOINT_MAX_ITER, last_update })
}

type Stepper = fn(&dyn OdeSystem, &State, f64) -> Result<State>;

fn fixed_steps(sys: &dyn OdeSystem, y0: State, t_end: f64, settings: &Settings, step: Stepper) -> Result<Solution> {
    let n = (t_end / settings.dt).round().max(1.0) as usize;
    let n = if (n as f64 * settings.dt - t_end).abs() <= 1e-9 * t_end { n } else { (t_end / settings.dt).ceil() as usize };
    let mut sol = Solution { times: vec![0.0], states: vec![y0], diagnostics: Vec::new(), truncated: None };
    let mut y = y0;
    for i in 0..n {
        if i >= settings.max_steps {
            sol.truncated = Some(format!("step limit {} reached", settings.max_steps));
            break;
        }
        let t = sol.times[i];
        let t_next = if i + 1 == n { t_end } else { (i + 1) as f64 * settings.dt };
        let h = t_next - t;
        let next = match step(sys, &y, h).and_then(|nx| sys.admissible(&y, &nx).map(|_| nx)) {
            Ok(nx) => nx,
            Err(Error::NonConvergence { iterations, last_update }) => {
                return Err(Error::NonConvergence { iterations, last_update })
            }
            Err(e) => {
                sol.truncated = Some(format!("stopped at t = {t}: {e}"));
                break;
            }
        };
        y = next;
        sol.times.push(t_next);
        sol.states.push(y);
        sol.diagnostics.push(StepDiagnostics { dt: h, local_error: None, rejected: 0 });
    }
    Ok(sol)
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are
// not needed; the last row is the fifth-order solution (first same as last).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Trial {
    y: State,
    k_last: State,
    err: f64,
}

fn dp_trial(sys: &dyn OdeSystem, y: &State, k1: &State, h: f64, tol: f64) -> Result<Trial> {
    let mut k = [[0.0; 6]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..6 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = sys.rhs(&ys)?;
        if s == 6 {
            let mut err2 = 0.0;
            for i in 0..6 {
                let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
                let sc = tol + tol * y[i].abs().max(ys[i].abs());
                err2 += (e / sc).powi(2);
            }
            return Ok(Trial { y: ys, k_last: k[6], err: (err2 / 6.0).sqrt() });
        }
    }
    unreachable!()
}

fn initial_step(sys: &dyn OdeSystem, y: &State, f0: &State, tol: f64, t_end: f64) -> f64 {
    let norm = |v: &State, y: &State| -> f64 {
        ((0..6).map(|i| (v[i] / (tol + tol * y[i].abs())).powi(2)).sum::<f64>() / 6.0).sqrt()
    };
    let d0 = norm(y, y);
    let d1 = norm(f0, y);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let h1 = match sys.rhs(&y1) {
        Ok(f1) => {
            let mut diff = [0.0; 6];
            for i in 0..6 {
                diff[i] = f1[i] - f0[i];
            }
            let d2 = norm(&diff, y) / h0;
            let m = d1.max(d2);
            if m <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / m).powf(0.2)
            }
        }
        Err(_) => h0,
    };
    (100.0 * h0).min(h1).min(t_end)
}

fn dormand_prince(sys: &dyn OdeSystem, y0: State, t_end: f64, settings: &Settings) -> Result<Solution> {
    let tol = settings.tol;
    let mut sol = Solution { times: vec![0.0], states: vec![y0], diagnostics: Vec::new(), truncated: None };
    let mut y = y0;
    let mut t = 0.0;
    let mut k1 = sys.rhs(&y)?;
    let mut h = if settings.dt > 0.0 { settings.dt } else { initial_step(sys, &y, &k1, tol, t_end) };
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    while t < t_end {
        if steps >= settings.max_steps {
            sol.truncated = Some(format!("step limit {} reached at t = {t}", settings.max_steps));
            break;
        }
        let mut rejected = 0usize;
        let mut last_failure: Option<Error> = None;
        loop {
            let last = t + h >= t_end;
            let h_try = if last { t_end - t } else { h };
            let outcome = dp_trial(sys, &y, &k1, h_try, tol).and_then(|tr| sys.admissible(&y, &tr.y).map(|_| tr));
            match outcome {
                Ok(tr) if tr.err <= 1.0 => {
                    let err = tr.err.max(1e-16);
                    let fac = (err.powf(EXPO) / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                    let h_next = h_try / fac;
                    err_old = err.max(1e-4);
                    t = if last { t_end } else { t + h_try };
                    y = tr.y;
                    k1 = tr.k_last;
                    sol.times.push(t);
                    sol.states.push(y);
                    sol.diagnostics.push(StepDiagnostics { dt: h_try, local_error: Some(tr.err * tol), rejected });
                    h = if rejected > 0 { h_next.min(h_try) } else { h_next };
                    break;
                }
                Ok(tr) => {
                    let fac = (tr.err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN);
                    h = h_try / fac;
                }
                Err(e) => {
                    last_failure = Some(e);
                    h = 0.5 * h_try;
                }
            }
            rejected += 1;
            if h < DT_MIN {
                let reason = match &last_failure {
                    Some(e) => format!("step size fell below {DT_MIN:e} at t = {t}: {e}"),
                    None => format!("step size fell below {DT_MIN:e} at t = {t}"),
                };
                sol.truncated = Some(reason);
                return Ok(sol);
            }
        }
        steps += 1;
    }
    Ok(sol)
}
