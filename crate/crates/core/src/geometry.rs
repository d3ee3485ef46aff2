//! Riemannian geometry of the constant-curvature spaces in geodesic polar
//! coordinates `(r, θ, φ)`: metric, volume form, the six Killing fields, the
//! geodesic forces, the Legendre map and the two alternative radial charts
//! `ρ = Sin_k(r)` and `R = Tan_k(r)`.

use serde::{Deserialize, Serialize};

use crate::error::{singular, Error, Result};
use crate::kappa::{asin_k, atan_k, cos_k, sin_k, tan_k, Curvature};

/// Denominators smaller than this are treated as singular.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Finite-difference step used for vector-field derivatives.
pub const FIELD_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ConfigPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        ConfigPoint { r, theta, phi }
    }

    /// Checks `r > 0`, `r < π/√κ` on the sphere and `θ ∈ (0, π)`.
    /// `φ` is stored unwrapped and never rejected.
    pub fn validate(&self, kappa: Curvature) -> Result<()> {
        if !(self.r.is_finite() && self.theta.is_finite() && self.phi.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite configuration {self:?}")));
        }
        if self.r <= 0.0 || self.r >= kappa.max_radius() {
            return Err(singular(format!("r = {} outside (0, {})", self.r, kappa.max_radius())));
        }
        if self.theta <= 0.0 || self.theta >= std::f64::consts::PI {
            return Err(singular(format!("theta = {} outside (0, π)", self.theta)));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r, self.theta, self.phi]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ConfigPoint::new(a[0], a[1], a[2])
    }
}

/// Point of phase space `T*Q` in geodesic polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: ConfigPoint,
    pub p_r: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

impl PhaseState {
    pub fn new(r: f64, theta: f64, phi: f64, p_r: f64, p_theta: f64, p_phi: f64) -> Self {
        PhaseState { q: ConfigPoint::new(r, theta, phi), p_r, p_theta, p_phi }
    }

    /// `[r, θ, φ, p_r, p_θ, p_φ]`
    pub fn as_array(&self) -> [f64; 6] {
        [self.q.r, self.q.theta, self.q.phi, self.p_r, self.p_theta, self.p_phi]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        PhaseState::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn validate(&self, kappa: Curvature) -> Result<()> {
        self.q.validate(kappa)?;
        if !(self.p_r.is_finite() && self.p_theta.is_finite() && self.p_phi.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite momenta in {self:?}")));
        }
        Ok(())
    }
}

/// Point of the velocity phase space `TQ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityState {
    pub q: ConfigPoint,
    pub v_r: f64,
    pub v_theta: f64,
    pub v_phi: f64,
}

impl VelocityState {
    pub fn new(r: f64, theta: f64, phi: f64, v_r: f64, v_theta: f64, v_phi: f64) -> Self {
        VelocityState { q: ConfigPoint::new(r, theta, phi), v_r, v_theta, v_phi }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.q.r, self.q.theta, self.q.phi, self.v_r, self.v_theta, self.v_phi]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        VelocityState::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

/// Components of a vector field in the coordinate basis `(∂_r, ∂_θ, ∂_φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TangentVector {
    pub a_r: f64,
    pub a_theta: f64,
    pub a_phi: f64,
}

impl TangentVector {
    pub fn new(a_r: f64, a_theta: f64, a_phi: f64) -> Self {
        TangentVector { a_r, a_theta, a_phi }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a_r, self.a_theta, self.a_phi]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        TangentVector::new(a[0], a[1], a[2])
    }

    pub fn scaled(&self, c: f64) -> Self {
        TangentVector::new(c * self.a_r, c * self.a_theta, c * self.a_phi)
    }

    pub fn max_abs_diff(&self, other: &TangentVector) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `(g_rr, g_θθ, g_φφ)` of the diagonal metric.
pub fn metric_coeffs(kappa: Curvature, q: &ConfigPoint) -> (f64, f64, f64) {
    let s = sin_k(kappa, q.r);
    let st = q.theta.sin();
    (1.0, s * s, s * s * st * st)
}

/// `√|g| = Sin_k²(r) sin θ`.
pub fn volume_density(kappa: Curvature, q: &ConfigPoint) -> f64 {
    let s = sin_k(kappa, q.r);
    s * s * q.theta.sin()
}

/// The six Killing vector fields: `X1..X3` depend on κ, `Y1..Y3` are rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KillingField {
    X1,
    X2,
    X3,
    Y1,
    Y2,
    Y3,
}

impl KillingField {
    pub const ALL: [KillingField; 6] = [
        KillingField::X1,
        KillingField::X2,
        KillingField::X3,
        KillingField::Y1,
        KillingField::Y2,
        KillingField::Y3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KillingField::X1 => "X1",
            KillingField::X2 => "X2",
            KillingField::X3 => "X3",
            KillingField::Y1 => "Y1",
            KillingField::Y2 => "Y2",
            KillingField::Y3 => "Y3",
        }
    }
}

fn guard(value: f64, what: &str) -> Result<f64> {
    if value.abs() < SINGULAR_EPS {
        Err(singular(format!("{what} vanishes")))
    } else {
        Ok(value)
    }
}

pub fn killing_field(id: KillingField, kappa: Curvature, q: &ConfigPoint) -> Result<TangentVector> {
    let (st, ct) = q.theta.sin_cos();
    let (sp, cp) = q.phi.sin_cos();
    let v = match id {
        KillingField::X1 | KillingField::X2 | KillingField::X3 => {
            let s = guard(sin_k(kappa, q.r), "Sin_k(r)")?;
            let cot = cos_k(kappa, q.r) / s;
            match id {
                KillingField::X1 => {
                    let st = guard(st, "sin(theta)")?;
                    TangentVector::new(st * cp, cot * ct * cp, -cot * sp / st)
                }
                KillingField::X2 => {
                    let st = guard(st, "sin(theta)")?;
                    TangentVector::new(st * sp, cot * ct * sp, cot * cp / st)
                }
                _ => TangentVector::new(ct, -cot * st, 0.0),
            }
        }
        KillingField::Y1 => {
            let st = guard(st, "sin(theta)")?;
            TangentVector::new(0.0, -sp, -cp * ct / st)
        }
        KillingField::Y2 => {
            let st = guard(st, "sin(theta)")?;
            TangentVector::new(0.0, cp, -sp * ct / st)
        }
        KillingField::Y3 => TangentVector::new(0.0, 0.0, 1.0),
    };
    Ok(v)
}

fn shifted(q: &ConfigPoint, axis: usize, delta: f64) -> ConfigPoint {
    let mut a = q.as_array();
    a[axis] += delta;
    ConfigPoint::from_array(a)
}

fn check_stencil(kappa: Curvature, q: &ConfigPoint, h: f64) -> Result<()> {
    for axis in 0..2 {
        for sign in [-1.0, 1.0] {
            shifted(q, axis, sign * h).validate(kappa)?;
        }
    }
    Ok(())
}

/// `∂_j V^i` by central differences: row `j` holds the derivative along coordinate `j`.
fn field_jacobian(id: KillingField, kappa: Curvature, q: &ConfigPoint, h: f64) -> Result<[[f64; 3]; 3]> {
    let mut jac = [[0.0; 3]; 3];
    for (j, row) in jac.iter_mut().enumerate() {
        let plus = killing_field(id, kappa, &shifted(q, j, h))?.as_array();
        let minus = killing_field(id, kappa, &shifted(q, j, -h))?.as_array();
        for i in 0..3 {
            row[i] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Vector-field commutator `[A,B]^i = A^j ∂_j B^i − B^j ∂_j A^i` with
/// central differences of step `h` in every coordinate.
pub fn lie_bracket_numeric(
    a: KillingField,
    b: KillingField,
    kappa: Curvature,
    q: &ConfigPoint,
    h: f64,
) -> Result<TangentVector> {
    check_stencil(kappa, q, h)?;
    let av = killing_field(a, kappa, q)?.as_array();
    let bv = killing_field(b, kappa, q)?.as_array();
    let da = field_jacobian(a, kappa, q, h)?;
    let db = field_jacobian(b, kappa, q, h)?;
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            *o += av[j] * db[j][i] - bv[j] * da[j][i];
        }
    }
    Ok(TangentVector::from_array(out))
}

/// Components of `L_V g` for a Killing field `V`, computed with central
/// differences of the metric and of the field.
pub fn metric_lie_derivative(id: KillingField, kappa: Curvature, q: &ConfigPoint, h: f64) -> Result<[[f64; 3]; 3]> {
    check_stencil(kappa, q, h)?;
    let metric = |p: &ConfigPoint| {
        let (a, b, c) = metric_coeffs(kappa, p);
        [a, b, c]
    };
    let v = killing_field(id, kappa, q)?.as_array();
    let dv = field_jacobian(id, kappa, q, h)?;
    let g = metric(q);
    let mut dg = [[0.0; 3]; 3];
    for (k, row) in dg.iter_mut().enumerate() {
        let plus = metric(&shifted(q, k, h));
        let minus = metric(&shifted(q, k, -h));
        for i in 0..3 {
            row[i] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // V^k ∂_k g_ij + g_kj ∂_i V^k + g_ik ∂_j V^k, metric diagonal
            let transport = if i == j { (0..3).map(|k| v[k] * dg[k][i]).sum() } else { 0.0 };
            out[i][j] = transport + g[j] * dv[i][j] + g[i] * dv[j][i];
        }
    }
    Ok(out)
}

/// `(1/√g) ∂_i(√g V^i)`, the divergence of `V` with respect to the volume form.
pub fn volume_divergence(id: KillingField, kappa: Curvature, q: &ConfigPoint, h: f64) -> Result<f64> {
    check_stencil(kappa, q, h)?;
    let mut div = 0.0;
    for i in 0..3 {
        let flux = |p: ConfigPoint| -> Result<f64> {
            Ok(volume_density(kappa, &p) * killing_field(id, kappa, &p)?.as_array()[i])
        };
        div += (flux(shifted(q, i, h))? - flux(shifted(q, i, -h))?) / (2.0 * h);
    }
    Ok(div / volume_density(kappa, q))
}

/// Accelerations `(f_r, f_θ, f_φ)` of the geodesic Euler–Lagrange equations.
pub fn geodesic_forces(kappa: Curvature, s: &VelocityState) -> Result<(f64, f64, f64)> {
    let sn = guard(sin_k(kappa, s.q.r), "Sin_k(r)")?;
    let cs = cos_k(kappa, s.q.r);
    let (st, ct) = s.q.theta.sin_cos();
    let st = guard(st, "sin(theta)")?;
    let inv_tan = cs / sn;
    let (vr, vt, vp) = (s.v_r, s.v_theta, s.v_phi);
    let f_r = cs * sn * (vt * vt + st * st * vp * vp);
    let f_theta = -2.0 * inv_tan * vr * vt + ct * st * vp * vp;
    let f_phi = -2.0 * (vr * inv_tan + vt * ct / st) * vp;
    Ok((f_r, f_theta, f_phi))
}

/// Geodesic kinetic energy `T_g = ½(v_r² + Sin²v_θ² + Sin² sin²θ v_φ²)`.
pub fn geodesic_lagrangian(kappa: Curvature, s: &VelocityState) -> f64 {
    let (g_rr, g_tt, g_pp) = metric_coeffs(kappa, &s.q);
    0.5 * (g_rr * s.v_r * s.v_r + g_tt * s.v_theta * s.v_theta + g_pp * s.v_phi * s.v_phi)
}

pub fn legendre(kappa: Curvature, s: &VelocityState) -> PhaseState {
    let (_, g_tt, g_pp) = metric_coeffs(kappa, &s.q);
    PhaseState { q: s.q, p_r: s.v_r, p_theta: g_tt * s.v_theta, p_phi: g_pp * s.v_phi }
}

pub fn legendre_inv(kappa: Curvature, s: &PhaseState) -> Result<VelocityState> {
    let (_, g_tt, g_pp) = metric_coeffs(kappa, &s.q);
    let g_tt = guard(g_tt, "Sin_k(r)^2")?;
    let g_pp = guard(g_pp, "Sin_k(r)^2 sin(theta)^2")?;
    Ok(VelocityState { q: s.q, v_r: s.p_r, v_theta: s.p_theta / g_tt, v_phi: s.p_phi / g_pp })
}

/// Radial coordinate used by an alternative chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// Geodesic distance `r`.
    Geodesic,
    /// `ρ = Sin_k(r)`.
    Rho,
    /// `R = Tan_k(r)`.
    Tangent,
}

/// Phase-space point in one of the charts; angular coordinates and momenta
/// are shared by all three.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartState {
    pub chart: Chart,
    pub radial: f64,
    pub theta: f64,
    pub phi: f64,
    pub p_radial: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

impl ChartState {
    pub fn as_array(&self) -> [f64; 6] {
        [self.radial, self.theta, self.phi, self.p_radial, self.p_theta, self.p_phi]
    }

    pub fn from_array(chart: Chart, a: [f64; 6]) -> Self {
        ChartState { chart, radial: a[0], theta: a[1], phi: a[2], p_radial: a[3], p_theta: a[4], p_phi: a[5] }
    }
}

fn barrier_guard(kappa: Curvature, r: f64) -> Result<f64> {
    let c = cos_k(kappa, r);
    if c.abs() < crate::kappa::DEFAULT_DOMAIN_EPS {
        Err(singular(format!("Cos_k(r) vanishes at r = {r}")))
    } else {
        Ok(c)
    }
}

/// `ρ = Sin_k(r)`, `p_ρ = p_r / Cos_k(r)`.
pub fn to_rho_chart(kappa: Curvature, s: &PhaseState) -> Result<ChartState> {
    let c = barrier_guard(kappa, s.q.r)?;
    Ok(ChartState {
        chart: Chart::Rho,
        radial: sin_k(kappa, s.q.r),
        theta: s.q.theta,
        phi: s.q.phi,
        p_radial: s.p_r / c,
        p_theta: s.p_theta,
        p_phi: s.p_phi,
    })
}

/// `R = Tan_k(r)`, `p_R = p_r Cos_k²(r)`.
pub fn to_r_chart(kappa: Curvature, s: &PhaseState) -> Result<ChartState> {
    let c = barrier_guard(kappa, s.q.r)?;
    Ok(ChartState {
        chart: Chart::Tangent,
        radial: tan_k(kappa, s.q.r)?,
        theta: s.q.theta,
        phi: s.q.phi,
        p_radial: s.p_r * c * c,
        p_theta: s.p_theta,
        p_phi: s.p_phi,
    })
}

/// Maps a chart state back to geodesic polar coordinates (inner hemisphere
/// branch when κ > 0).
pub fn from_chart(kappa: Curvature, cs: &ChartState) -> Result<PhaseState> {
    let (r, p_r) = match cs.chart {
        Chart::Geodesic => (cs.radial, cs.p_radial),
        Chart::Rho => {
            let r = asin_k(kappa, cs.radial)?;
            (r, cs.p_radial * barrier_guard(kappa, r)?)
        }
        Chart::Tangent => {
            let r = atan_k(kappa, cs.radial)?;
            let c = barrier_guard(kappa, r)?;
            (r, cs.p_radial / (c * c))
        }
    };
    Ok(PhaseState::new(r, cs.theta, cs.phi, p_r, cs.p_theta, cs.p_phi))
}

/// Kinetic energy in any of the three charts, from the chart Lagrangians.
pub fn chart_kinetic(kappa: Curvature, cs: &ChartState) -> Result<f64> {
    let k = kappa.value();
    let st = guard(cs.theta.sin(), "sin(theta)")?;
    let angular = cs.p_theta * cs.p_theta + cs.p_phi * cs.p_phi / (st * st);
    let x = cs.radial;
    let t = match cs.chart {
        Chart::Geodesic => {
            let s = guard(sin_k(kappa, x), "Sin_k(r)")?;
            0.5 * (cs.p_radial * cs.p_radial + angular / (s * s))
        }
        Chart::Rho => {
            let rho = guard(x, "rho")?;
            0.5 * ((1.0 - k * rho * rho) * cs.p_radial * cs.p_radial + angular / (rho * rho))
        }
        Chart::Tangent => {
            let big_r = guard(x, "R")?;
            let w = 1.0 + k * big_r * big_r;
            0.5 * (w * w * cs.p_radial * cs.p_radial + w * angular / (big_r * big_r))
        }
    };
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    fn kap(k: f64) -> Curvature {
        Curvature::new(k).unwrap()
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric_coeffs(kap(0.0), &ConfigPoint::new(2.0, FRAC_PI_2, 0.3)), (1.0, 4.0, 4.0));
        let (a, b, c) = metric_coeffs(kap(1.0), &ConfigPoint::new(FRAC_PI_2, FRAC_PI_2, 0.0));
        assert_eq!(a, 1.0);
        assert!((b - 1.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
        // sinh²(1) = 1.3810978455418157, times 3/4
        let (_, b, c) = metric_coeffs(kap(-1.0), &ConfigPoint::new(1.0, FRAC_PI_3, 0.0));
        assert!((b - 1.3810978455418155).abs() < 1e-14);
        assert!((c - 1.0358233841563615).abs() < 1e-14);
    }

    #[test]
    fn volume_examples() {
        assert!((volume_density(kap(0.0), &ConfigPoint::new(1.0, FRAC_PI_2, 0.0)) - 1.0).abs() < 1e-15);
        assert!((volume_density(kap(1.0), &ConfigPoint::new(FRAC_PI_2, FRAC_PI_6, 0.0)) - 0.5).abs() < 1e-15);
        // sinh²(0.7) sin(1.1)
        let v = volume_density(kap(-1.0), &ConfigPoint::new(0.7, 1.1, 0.0));
        assert!((v - 0.5128445915208889).abs() < 1e-14);
    }

    #[test]
    fn killing_examples() {
        let q = ConfigPoint::new(0.8, 1.2, 2.0);
        for k in [-1.0, 0.0, 1.0] {
            assert_eq!(killing_field(KillingField::Y3, kap(k), &q).unwrap(), TangentVector::new(0.0, 0.0, 1.0));
        }
        let x3 = killing_field(KillingField::X3, kap(0.0), &ConfigPoint::new(1.0, FRAC_PI_2, 0.0)).unwrap();
        assert!(x3.max_abs_diff(&TangentVector::new(0.0, -1.0, 0.0)) < 1e-15);
        // X1 at κ=1, r=π/4, θ=π/3, φ=π/6 from straight evaluation:
        // (sinθcosφ, cot r cosθ cosφ, -cot r sinφ/sinθ) = (3/4, √3/4, -1/√3)
        let x1 = killing_field(KillingField::X1, kap(1.0), &ConfigPoint::new(FRAC_PI_4, FRAC_PI_3, FRAC_PI_6)).unwrap();
        assert!(x1.max_abs_diff(&TangentVector::new(0.75, 3f64.sqrt() / 4.0, -1.0 / 3f64.sqrt())) < 1e-14);
    }

    #[test]
    fn killing_singularities() {
        let pole = ConfigPoint::new(1.0, 0.0, 0.0);
        assert!(matches!(killing_field(KillingField::Y1, kap(1.0), &pole), Err(Error::DomainSingularity(_))));
        let origin = ConfigPoint::new(0.0, 1.0, 0.0);
        assert!(killing_field(KillingField::X3, kap(1.0), &origin).is_err());
    }

    #[test]
    fn lie_bracket_examples() {
        let q = ConfigPoint::new(1.0, FRAC_PI_3, PI / 5.0);
        let h = FIELD_FD_STEP;
        let b = lie_bracket_numeric(KillingField::Y3, KillingField::Y1, kap(0.4), &q, h).unwrap();
        let y2 = killing_field(KillingField::Y2, kap(0.4), &q).unwrap();
        assert!(b.max_abs_diff(&y2.scaled(-1.0)) < 1e-8);
        let b = lie_bracket_numeric(KillingField::X1, KillingField::X2, kap(0.0), &q, h).unwrap();
        assert!(b.max_abs_diff(&TangentVector::default()) < 1e-8);
        let b = lie_bracket_numeric(KillingField::X1, KillingField::X2, kap(1.0), &q, h).unwrap();
        let y3 = killing_field(KillingField::Y3, kap(1.0), &q).unwrap();
        assert!(b.max_abs_diff(&y3.scaled(-1.0)) < 1e-8);
    }

    #[test]
    fn lie_bracket_rejects_stencil_across_pole() {
        let q = ConfigPoint::new(1.0, 1e-6, 0.0);
        assert!(lie_bracket_numeric(KillingField::Y1, KillingField::Y2, kap(1.0), &q, 1e-5).is_err());
    }

    #[test]
    fn geodesic_force_examples() {
        let (a, b, c) = geodesic_forces(kap(0.0), &VelocityState::new(1.3, 0.9, 0.2, 0.7, 0.0, 0.0)).unwrap();
        assert_eq!((a, b, c), (0.0, 0.0, 0.0));
        let (fr, _, _) = geodesic_forces(kap(1.0), &VelocityState::new(FRAC_PI_2, FRAC_PI_2, 0.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(fr.abs() < 1e-15);
        // κ=-1, r=0.5, θ=π/4, v=(0.1,0.2,0.3): direct evaluation of the printed forms
        let (sh, ch) = (0.5f64.sinh(), 0.5f64.cosh());
        let (st, ct) = (FRAC_PI_4.sin(), FRAC_PI_4.cos());
        let want = (
            ch * sh * (0.04 + st * st * 0.09),
            -2.0 * (ch / sh) * 0.1 * 0.2 + ct * st * 0.09,
            -2.0 * (0.1 * ch / sh + 0.2 * ct / st) * 0.3,
        );
        let got = geodesic_forces(kap(-1.0), &VelocityState::new(0.5, FRAC_PI_4, 0.0, 0.1, 0.2, 0.3)).unwrap();
        assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14 && (got.2 - want.2).abs() < 1e-14);
    }

    #[test]
    fn legendre_examples() {
        let p = legendre(kap(0.0), &VelocityState::new(1.0, FRAC_PI_2, 0.0, 1.0, 1.0, 1.0));
        assert!((p.p_r - 1.0).abs() < 1e-15 && (p.p_theta - 1.0).abs() < 1e-15 && (p.p_phi - 1.0).abs() < 1e-15);
        let v = VelocityState::new(FRAC_PI_3, FRAC_PI_4, 0.0, 0.2, 0.5, -0.1);
        let p = legendre(kap(1.0), &v);
        // sin²(π/3) = 3/4, sin²(π/4) = 1/2
        assert!((p.p_r - 0.2).abs() < 1e-15);
        assert!((p.p_theta - 0.375).abs() < 1e-15);
        assert!((p.p_phi + 0.0375).abs() < 1e-15);
        let back = legendre_inv(kap(1.0), &p).unwrap();
        assert!((back.v_theta - 0.5).abs() < 1e-15 && (back.v_phi + 0.1).abs() < 1e-15);
    }

    #[test]
    fn chart_examples() {
        let s = PhaseState::new(1.3, 0.7, 0.2, 0.4, -0.3, 0.8);
        let rho = to_rho_chart(kap(0.0), &s).unwrap();
        let big = to_r_chart(kap(0.0), &s).unwrap();
        assert_eq!((rho.radial, rho.p_radial), (1.3, 0.4));
        assert_eq!((big.radial, big.p_radial), (1.3, 0.4));
        let s = PhaseState::new(FRAC_PI_4, 1.0, 0.0, 1.0, 0.0, 0.0);
        let rho = to_rho_chart(kap(1.0), &s).unwrap();
        assert!((rho.radial - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((rho.p_radial - 2f64.sqrt()).abs() < 1e-15);
        let barrier = PhaseState::new(FRAC_PI_2, 1.0, 0.0, 1.0, 0.0, 0.0);
        assert!(to_rho_chart(kap(1.0), &barrier).is_err());
        assert!(to_r_chart(kap(1.0), &barrier).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let s = PhaseState::new(0.9, 0.7, 0.2, 0.4, -0.3, 0.8);
        for k in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            for cs in [to_rho_chart(kap(k), &s).unwrap(), to_r_chart(kap(k), &s).unwrap()] {
                let back = from_chart(kap(k), &cs).unwrap();
                for (a, b) in back.as_array().iter().zip(s.as_array()) {
                    assert!((a - b).abs() < 1e-13);
                }
            }
        }
    }
}
