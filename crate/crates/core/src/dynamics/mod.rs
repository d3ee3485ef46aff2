//! Brackets, integration and audits.

pub mod audit;
pub mod bracket;
pub mod conservation;
pub mod integrate;
pub mod orbit;
pub mod rank;

pub use audit::{bracket_table_audit, fradkin_audit, BracketResidual, IdentityReport};
pub use bracket::{poisson_bracket, poisson_bracket_fd};
pub use conservation::{conservation_report, ConservationReport};
pub use integrate::{integrate, Method, Settings, Trajectory};
pub use orbit::{closed_orbit_check, OrbitReport};
pub use rank::{independence_rank, RankReport};
