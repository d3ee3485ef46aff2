//! Canonical Poisson bracket `{f, g} = Σ_a (∂f/∂q_a ∂g/∂p_a − ∂f/∂p_a ∂g/∂q_a)`,
//! so that `dF/dt = {F, H}`.

use crate::error::Result;
use crate::geometry::PhaseState;
use crate::jet::Gradient;
use crate::observables::{fd_gradient, PhaseFunction};

/// Default step of the finite-difference bracket.
pub const FD_STEP: f64 = 1e-6;

/// Bracket value and the sum of the absolute values of its six products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketValue {
    pub value: f64,
    pub scale: f64,
}

pub fn bracket_of_gradients(df: &Gradient, dg: &Gradient) -> BracketValue {
    let mut value = 0.0;
    let mut scale = 0.0;
    for a in 0..3 {
        let u = df[a] * dg[a + 3];
        let v = df[a + 3] * dg[a];
        value += u - v;
        scale += u.abs() + v.abs();
    }
    BracketValue { value, scale }
}

pub fn bracket_with_scale(f: &dyn PhaseFunction, g: &dyn PhaseFunction, s: &PhaseState) -> Result<BracketValue> {
    Ok(bracket_of_gradients(&f.gradient(s)?, &g.gradient(s)?))
}

/// `{f, g}` from analytic gradients.
pub fn poisson_bracket(f: &dyn PhaseFunction, g: &dyn PhaseFunction, s: &PhaseState) -> Result<f64> {
    Ok(bracket_with_scale(f, g, s)?.value)
}

/// `{f, g}` from central-difference gradients with step `h`.
pub fn poisson_bracket_fd(f: &dyn PhaseFunction, g: &dyn PhaseFunction, s: &PhaseState, h: f64) -> Result<f64> {
    Ok(bracket_of_gradients(&fd_gradient(f, s, h)?, &fd_gradient(g, s, h)?).value)
}
