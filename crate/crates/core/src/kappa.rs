//! Curvature-dependent trigonometric kernels.
//!
//! `Cos_k`, `Sin_k` and `Tan_k` interpolate between the circular functions
//! (κ > 0), the Euclidean limit (κ = 0) and the hyperbolic functions (κ < 0).
//! For `|κ| x² < 1e-6` the closed forms are replaced by their Taylor series in
//! κ so that the limit κ → 0 is reached without cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{singular, Error, Result};
use crate::jet::Jet;

/// Below this value of `|κ| x²` the kernels use the series in κ.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Default guard on `|Cos_k(x)|` used by [`tan_k`].
pub const DEFAULT_DOMAIN_EPS: f64 = 1e-10;

/// Which of the three model spaces a curvature selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

/// The curvature parameter κ (1/length²). Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Curvature(f64);

impl Curvature {
    pub const EUCLIDEAN: Curvature = Curvature(0.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() {
            Ok(Curvature(kappa))
        } else {
            Err(Error::InvalidParameter(format!("curvature must be finite, got {kappa}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn geometry(self) -> Geometry {
        if self.0 > 0.0 {
            Geometry::Spherical
        } else if self.0 < 0.0 {
            Geometry::Hyperbolic
        } else {
            Geometry::Euclidean
        }
    }

    /// Largest admissible geodesic distance `π/√κ` on the sphere, infinity otherwise.
    pub fn max_radius(self) -> f64 {
        if self.0 > 0.0 {
            std::f64::consts::PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Location `π/(2√κ)` of the equator where `Cos_k` vanishes (sphere only).
    pub fn barrier_radius(self) -> Option<f64> {
        (self.0 > 0.0).then(|| std::f64::consts::FRAC_PI_2 / self.0.sqrt())
    }
}

impl TryFrom<f64> for Curvature {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Curvature::new(v)
    }
}

impl From<Curvature> for f64 {
    fn from(c: Curvature) -> f64 {
        c.0
    }
}

impl std::fmt::Display for Curvature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn cos_k(kappa: Curvature, x: f64) -> f64 {
    let k = kappa.0;
    if k == 0.0 {
        return 1.0;
    }
    let kx2 = k * x * x;
    if kx2.abs() < SERIES_THRESHOLD {
        // 1 - κx²/2 + κ²x⁴/24
        1.0 - 0.5 * kx2 + kx2 * kx2 / 24.0
    } else if k > 0.0 {
        (k.sqrt() * x).cos()
    } else {
        ((-k).sqrt() * x).cosh()
    }
}

pub fn sin_k(kappa: Curvature, x: f64) -> f64 {
    let k = kappa.0;
    if k == 0.0 {
        return x;
    }
    let kx2 = k * x * x;
    if kx2.abs() < SERIES_THRESHOLD {
        // x (1 - κx²/6 + κ²x⁴/120)
        x * (1.0 - kx2 / 6.0 + kx2 * kx2 / 120.0)
    } else if k > 0.0 {
        let s = k.sqrt();
        (s * x).sin() / s
    } else {
        let s = (-k).sqrt();
        (s * x).sinh() / s
    }
}

pub fn tan_k(kappa: Curvature, x: f64) -> Result<f64> {
    tan_k_guarded(kappa, x, DEFAULT_DOMAIN_EPS)
}

pub fn tan_k_guarded(kappa: Curvature, x: f64, eps: f64) -> Result<f64> {
    let c = cos_k(kappa, x);
    if c.abs() < eps {
        return Err(singular(format!("Tan_k: |Cos_k({x})| = {:e} below {eps:e} (κ = {kappa})", c.abs())));
    }
    Ok(sin_k(kappa, x) / c)
}

#[inline]
pub fn d_sin_k(kappa: Curvature, x: f64) -> f64 {
    cos_k(kappa, x)
}

#[inline]
pub fn d_cos_k(kappa: Curvature, x: f64) -> f64 {
    -kappa.0 * sin_k(kappa, x)
}

pub fn d_tan_k(kappa: Curvature, x: f64) -> Result<f64> {
    let c = cos_k(kappa, x);
    if c.abs() < DEFAULT_DOMAIN_EPS {
        return Err(singular(format!("d Tan_k: Cos_k({x}) vanishes (κ = {kappa})")));
    }
    Ok(1.0 / (c * c))
}

/// Inverse of `Sin_k` on the branch containing the origin.
pub fn asin_k(kappa: Curvature, rho: f64) -> Result<f64> {
    let k = kappa.0;
    if k == 0.0 {
        Ok(rho)
    } else if k > 0.0 {
        let s = k.sqrt();
        let arg = s * rho;
        if arg.abs() > 1.0 {
            return Err(singular(format!("Sin_k^-1: |√κ ρ| = {} exceeds 1", arg.abs())));
        }
        Ok(arg.asin() / s)
    } else {
        let s = (-k).sqrt();
        Ok((s * rho).asinh() / s)
    }
}

/// Inverse of `Tan_k` on the branch containing the origin.
pub fn atan_k(kappa: Curvature, big_r: f64) -> Result<f64> {
    let k = kappa.0;
    if k == 0.0 {
        Ok(big_r)
    } else if k > 0.0 {
        let s = k.sqrt();
        Ok((s * big_r).atan() / s)
    } else {
        let s = (-k).sqrt();
        let arg = s * big_r;
        if arg.abs() >= 1.0 {
            return Err(singular(format!("Tan_k^-1: |√(-κ) R| = {} reaches 1", arg.abs())));
        }
        Ok(arg.atanh() / s)
    }
}

pub fn sin_k_jet(kappa: Curvature, x: Jet) -> Jet {
    x.chain(sin_k(kappa, x.value), d_sin_k(kappa, x.value))
}

pub fn cos_k_jet(kappa: Curvature, x: Jet) -> Jet {
    x.chain(cos_k(kappa, x.value), d_cos_k(kappa, x.value))
}

pub fn tan_k_jet(kappa: Curvature, x: Jet) -> Result<Jet> {
    Ok(x.chain(tan_k(kappa, x.value)?, d_tan_k(kappa, x.value)?))
}
