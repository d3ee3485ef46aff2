//! Hamiltonian mechanics on the spaces of constant curvature κ (the sphere S³,
//! Euclidean space E³ and hyperbolic space H³) in geodesic polar coordinates.
//!
//! The crate provides the κ-trigonometric kernels, the metric and its Killing
//! fields, a catalog of superintegrable systems with their first integrals,
//! a Poisson-bracket engine, integrators and the audits that check every
//! identity numerically.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod kappa;
pub mod observables;
pub mod sampling;
pub mod systems;

pub use error::{Error, Result};
pub use geometry::{ConfigPoint, PhaseState};
pub use kappa::Curvature;
pub use observables::{Observable, ObservableId, PhaseFunction};
pub use systems::{SystemId, SystemSpec};
