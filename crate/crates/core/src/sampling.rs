//! Rejection sampling of phase-space points away from coordinate singularities.
//!
//! All randomness comes from `ChaCha8Rng`; a `(seed, stream)` pair fixes the
//! sequence on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::PhaseState;
use crate::kappa::{cos_k, sin_k, Curvature};
use crate::observables::{kappa_cartesian, PhaseFunction};
use crate::systems::{SystemId, SystemSpec};

/// Name of the generator, recorded in reports.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64 + set_stream";

/// Minimum distance from every guarded denominator.
pub const MARGIN: f64 = 0.05;

/// Largest sampled radius.
pub const R_CAP: f64 = 2.0;

const MAX_ATTEMPTS: usize = 100_000;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Stable 64-bit FNV-1a hash, for deriving stream numbers from labels.
pub fn stream_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Upper end of the sampled radial range: `R_CAP`, and inside the
/// hemisphere `Cos_k > 0` on the sphere.
pub fn radial_cap(kappa: Curvature) -> f64 {
    match kappa.barrier_radius() {
        Some(b) => b.min(R_CAP),
        None => R_CAP,
    }
}

/// Geometric guards for a configuration.
pub fn config_is_regular(spec: &SystemSpec, s: &PhaseState) -> bool {
    let kappa = spec.kappa;
    let q = &s.q;
    if q.validate(kappa).is_err() || q.theta.sin() <= MARGIN {
        return false;
    }
    if sin_k(kappa, q.r) <= MARGIN || cos_k(kappa, q.r).abs() <= MARGIN {
        return false;
    }
    let (x, y, z) = kappa_cartesian(kappa, q);
    if x.abs() <= MARGIN || y.abs() <= MARGIN || z.abs() <= MARGIN {
        return false;
    }
    if spec.id == SystemId::Oscillator112 {
        let k = kappa.value();
        let t = sin_k(kappa, q.r) / cos_k(kappa, q.r);
        let w = t * q.theta.cos();
        if (1.0 - k * (x * x + y * y)).abs() <= MARGIN
            || (1.0 - k * w * w).abs() <= MARGIN
            || q.theta.cos().abs() <= MARGIN
        {
            return false;
        }
    }
    true
}

/// Geometric guards plus finite `H` and cataloged integrals.
pub fn accept(spec: &SystemSpec, s: &PhaseState) -> bool {
    if !config_is_regular(spec, s) {
        return false;
    }
    let finite = |v: Result<f64>| matches!(v, Ok(x) if x.is_finite());
    if !finite(spec.hamiltonian(s)) {
        return false;
    }
    spec.catalog().integrals.iter().all(|o| finite(o.value(s)))
}

/// Uniform draw: `r ∈ (0, radial_cap)`, `θ ∈ (0, π)`, `φ ∈ [0, 2π)`,
/// momenta in `[−1, 1]`. No guards applied.
pub fn raw_state<R: Rng>(kappa: Curvature, rng: &mut R) -> PhaseState {
    let cap = radial_cap(kappa);
    let r = rng.gen_range(0.0..cap);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut p = || rng.gen_range(-1.0..=1.0);
    PhaseState::new(r, theta, phi, p(), p(), p())
}

pub fn sample_state<R: Rng>(spec: &SystemSpec, rng: &mut R) -> Result<PhaseState> {
    for _ in 0..MAX_ATTEMPTS {
        let s = raw_state(spec.kappa, rng);
        if accept(spec, &s) {
            return Ok(s);
        }
    }
    Err(Error::InvalidParameter(format!("no admissible state found for {spec:?} after {MAX_ATTEMPTS} draws")))
}

pub fn sample_states<R: Rng>(spec: &SystemSpec, n: usize, rng: &mut R) -> Result<Vec<PhaseState>> {
    (0..n).map(|_| sample_state(spec, rng)).collect()
}

/// Energy below which every orbit of the system stays in a bounded region,
/// where known: infinite on the sphere and for the Euclidean oscillators,
/// the limit of the potential at infinity otherwise. `None` when no bound
/// is known or no bounded orbits exist.
pub fn bounded_energy(spec: &SystemSpec) -> Option<f64> {
    let k = spec.kappa.value();
    if k > 0.0 {
        return Some(f64::INFINITY);
    }
    let c = &spec.couplings;
    match spec.id {
        SystemId::FreeGeodesic => None,
        SystemId::Oscillator | SystemId::SmorodinskyWinternitz if k == 0.0 => Some(f64::INFINITY),
        SystemId::Oscillator | SystemId::SmorodinskyWinternitz => Some(c.alpha * c.alpha / (2.0 * k.abs())),
        SystemId::Oscillator112 if k == 0.0 => Some(f64::INFINITY),
        SystemId::Oscillator112 => None,
        SystemId::Kepler | SystemId::Kepler123 if c.k < 0.0 => Some(c.k * k.abs().sqrt()),
        SystemId::Kepler | SystemId::Kepler123 => None,
    }
}

/// An admissible state with `H` below [`bounded_energy`]; momenta of a
/// rejected draw are halved until the energy is low enough.
pub fn sample_bounded_state<R: Rng>(spec: &SystemSpec, rng: &mut R) -> Result<PhaseState> {
    let bound = bounded_energy(spec)
        .ok_or_else(|| Error::InvalidParameter(format!("no known bounded energy range for {spec:?}")))?;
    for _ in 0..MAX_ATTEMPTS / 100 {
        let mut s = sample_state(spec, rng)?;
        for _ in 0..30 {
            if accept(spec, &s) && spec.hamiltonian(&s)? < bound {
                return Ok(s);
            }
            s.p_r *= 0.5;
            s.p_theta *= 0.5;
            s.p_phi *= 0.5;
        }
    }
    Err(Error::InvalidParameter(format!("no bounded state found for {spec:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let spec = SystemSpec::kepler123(-1.0, -1.0, 0.1, 0.2, 0.3).unwrap();
        let a = sample_states(&spec, 5, &mut rng(7, 3)).unwrap();
        let b = sample_states(&spec, 5, &mut rng(7, 3)).unwrap();
        let c = sample_states(&spec, 5, &mut rng(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn samples_satisfy_guards() {
        for id in SystemId::ALL {
            for kappa in [-1.0, 0.0, 1.0] {
                let spec = match id {
                    SystemId::FreeGeodesic => SystemSpec::free(kappa),
                    SystemId::Oscillator => SystemSpec::oscillator(kappa, 1.0),
                    SystemId::SmorodinskyWinternitz => SystemSpec::sw(kappa, 1.0, 0.1, 0.2, 0.3),
                    SystemId::Oscillator112 => SystemSpec::osc112(kappa, 1.0, 0.1, 0.2),
                    SystemId::Kepler => SystemSpec::kepler(kappa, -1.0),
                    SystemId::Kepler123 => SystemSpec::kepler123(kappa, -1.0, 0.1, 0.2, 0.3),
                }
                .unwrap();
                let mut g = rng(1, stream_id(id.name()));
                for s in sample_states(&spec, 20, &mut g).unwrap() {
                    assert!(s.q.r < radial_cap(spec.kappa));
                    assert!(s.q.theta.sin() > MARGIN);
                }
            }
        }
    }

    #[test]
    fn bounded_states_lie_below_the_escape_energy() {
        let spec = SystemSpec::kepler(-1.0, -1.0).unwrap();
        assert_eq!(bounded_energy(&spec), Some(-1.0));
        let mut g = rng(3, 0);
        for _ in 0..10 {
            assert!(spec.hamiltonian(&sample_bounded_state(&spec, &mut g).unwrap()).unwrap() < -1.0);
        }
        assert_eq!(bounded_energy(&SystemSpec::oscillator(-2.0, 1.0).unwrap()), Some(0.25));
        assert!(bounded_energy(&SystemSpec::free(-1.0).unwrap()).is_none());
    }

    #[test]
    fn stream_id_is_stable() {
        assert_eq!(stream_id(""), 0xcbf29ce484222325);
        assert_ne!(stream_id("free"), stream_id("kepler"));
    }
}
