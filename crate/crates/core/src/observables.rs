//! Named phase-space functions: Noether momenta, angular momenta, κ-Cartesian
//! coordinates, the curved Fradkin tensor, the Runge–Lenz families and the
//! quartic integrals of the Kepler system with nonlinear terms.
//!
//! Each observable is evaluated as a [`Jet`], so its analytic gradient comes
//! with the value. Complex observables are exposed as a pair of real ones.
//!
//! # Name map
//!
//! | name | function |
//! |------|----------|
//! | `P1..P3` | Noether momenta of the `X_i` fields |
//! | `J1..J3` | angular momenta (Noether momenta of the `Y_i` fields) |
//! | `Psq`, `Jsq` | `ΣP_i²`, `ΣJ_i²` |
//! | `x`, `y`, `z` | κ-Cartesian coordinates `Sin_k(r)·(direction cosine)` |
//! | `lambda` | `1/Cos_k²(r)` |
//! | `K11 K22 K33 K12 K23 K31` | Fradkin components (diagonal ones carry the `k_i` terms) |
//! | `M1re..M3im` | real/imaginary parts of `M_j = P_j + iα Tan_k(r) u_j` |
//! | `KJ1..KJ3` | angular integrals with `k_i` terms |
//! | `Az`, `V112`, `K3`, `K12_112`, `KRL1_112`, `KRL2_112` | 1:1:2 oscillator functions |
//! | `KRL1..KRL3` | curved Runge–Lenz components |
//! | `lambda1..lambda3` | `1/x_κ²`, `1/y_κ²`, `1/z_κ²` |
//! | `Q1..Q3` | `p_r Sin_k(r)/x_κ` and companions |
//! | `R1..R3` | Runge–Lenz functions with nonlinear corrections |
//! | `N1re..N3im` | real/imaginary parts of `N_j = R_j + i√(2k_j) Q_j` |
//! | `KR1..KR3` | quartic integrals `|N_j|²` |
//!
//! `K13`, `K21` and `K32` are accepted as aliases of the symmetric entries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{singular, Error, Result};
use crate::geometry::{ConfigPoint, PhaseState, SINGULAR_EPS};
use crate::jet::{Gradient, Jet};
use crate::kappa::{cos_k_jet, sin_k, sin_k_jet, Curvature, DEFAULT_DOMAIN_EPS};

/// Anything that can be evaluated with its gradient on phase space.
pub trait PhaseFunction {
    fn label(&self) -> String;

    fn jet(&self, s: &PhaseState) -> Result<Jet>;

    fn value(&self, s: &PhaseState) -> Result<f64> {
        Ok(self.jet(s)?.value)
    }

    fn gradient(&self, s: &PhaseState) -> Result<Gradient> {
        Ok(self.jet(s)?.grad)
    }
}

impl<T: PhaseFunction + ?Sized> PhaseFunction for &T {
    fn label(&self) -> String {
        (**self).label()
    }
    fn jet(&self, s: &PhaseState) -> Result<Jet> {
        (**self).jet(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// One-based, as in `P1`, `K23`.
    pub fn from_number(i: usize) -> Result<Axis> {
        match i {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            _ => Err(Error::InvalidParameter(format!("axis index {i} not in 1..=3"))),
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }

    /// The two other axes in cyclic order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

/// Coupling constants. Fields a system does not use stay at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Couplings {
    pub alpha: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Couplings {
    pub fn nonlinear(&self, a: Axis) -> f64 {
        match a {
            Axis::X => self.k1,
            Axis::Y => self.k2,
            Axis::Z => self.k3,
        }
    }

    pub fn has_nonlinear_terms(&self) -> bool {
        self.k1 != 0.0 || self.k2 != 0.0 || self.k3 != 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableId {
    NoetherP(Axis),
    AngularJ(Axis),
    NoetherSquared,
    AngularSquared,
    Coordinate(Axis),
    Lambda,
    Fradkin(Axis, Axis),
    MReal(Axis),
    MImag(Axis),
    AngularKJ(Axis),
    Az,
    V112,
    K3,
    K12Osc112,
    /// Only `X` and `Y` exist.
    RungeLenzOsc112(Axis),
    RungeLenz(Axis),
    CoordLambda(Axis),
    RadialRatio(Axis),
    RungeLenzR(Axis),
    NReal(Axis),
    NImag(Axis),
    QuarticKR(Axis),
}

impl ObservableId {
    pub fn name(self) -> String {
        use ObservableId::*;
        match self {
            NoetherP(a) => format!("P{}", a.number()),
            AngularJ(a) => format!("J{}", a.number()),
            NoetherSquared => "Psq".into(),
            AngularSquared => "Jsq".into(),
            Coordinate(a) => ["x", "y", "z"][a.index()].into(),
            Lambda => "lambda".into(),
            Fradkin(a, b) => {
                let (i, j) = fradkin_canonical(a, b);
                format!("K{}{}", i.number(), j.number())
            }
            MReal(a) => format!("M{}re", a.number()),
            MImag(a) => format!("M{}im", a.number()),
            AngularKJ(a) => format!("KJ{}", a.number()),
            Az => "Az".into(),
            V112 => "V112".into(),
            K3 => "K3".into(),
            K12Osc112 => "K12_112".into(),
            RungeLenzOsc112(a) => format!("KRL{}_112", a.number()),
            RungeLenz(a) => format!("KRL{}", a.number()),
            CoordLambda(a) => format!("lambda{}", a.number()),
            RadialRatio(a) => format!("Q{}", a.number()),
            RungeLenzR(a) => format!("R{}", a.number()),
            NReal(a) => format!("N{}re", a.number()),
            NImag(a) => format!("N{}im", a.number()),
            QuarticKR(a) => format!("KR{}", a.number()),
        }
    }

    /// Every observable id, in the order of the name map.
    pub fn all() -> Vec<ObservableId> {
        use ObservableId::*;
        let mut v = Vec::new();
        v.extend(Axis::ALL.map(NoetherP));
        v.extend(Axis::ALL.map(AngularJ));
        v.extend([NoetherSquared, AngularSquared]);
        v.extend(Axis::ALL.map(Coordinate));
        v.push(Lambda);
        v.extend(FRADKIN_ENTRIES.map(|(a, b)| Fradkin(a, b)));
        for a in Axis::ALL {
            v.extend([MReal(a), MImag(a)]);
        }
        v.extend(Axis::ALL.map(AngularKJ));
        v.extend([Az, V112, K3, K12Osc112, RungeLenzOsc112(Axis::X), RungeLenzOsc112(Axis::Y)]);
        v.extend(Axis::ALL.map(RungeLenz));
        v.extend(Axis::ALL.map(CoordLambda));
        v.extend(Axis::ALL.map(RadialRatio));
        v.extend(Axis::ALL.map(RungeLenzR));
        for a in Axis::ALL {
            v.extend([NReal(a), NImag(a)]);
        }
        v.extend(Axis::ALL.map(QuarticKR));
        v
    }

    pub fn from_name(name: &str) -> Result<ObservableId> {
        let alias = match name {
            "K13" => "K31",
            "K21" => "K12",
            "K32" => "K23",
            other => other,
        };
        ObservableId::all()
            .into_iter()
            .find(|id| id.name() == alias)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Polynomial degree in the momenta.
    pub fn momentum_degree(self) -> usize {
        use ObservableId::*;
        match self {
            Coordinate(_) | Lambda | Az | V112 | CoordLambda(_) => 0,
            NoetherP(_) | AngularJ(_) | MReal(_) | RadialRatio(_) | NImag(_) => 1,
            QuarticKR(_) => 4,
            _ => 2,
        }
    }
}

/// The six independent Fradkin entries: diagonal first, then `12, 23, 31`.
pub const FRADKIN_ENTRIES: [(Axis, Axis); 6] = [
    (Axis::X, Axis::X),
    (Axis::Y, Axis::Y),
    (Axis::Z, Axis::Z),
    (Axis::X, Axis::Y),
    (Axis::Y, Axis::Z),
    (Axis::Z, Axis::X),
];

fn fradkin_canonical(a: Axis, b: Axis) -> (Axis, Axis) {
    match (a, b) {
        (Axis::Y, Axis::X) => (Axis::X, Axis::Y),
        (Axis::Z, Axis::Y) => (Axis::Y, Axis::Z),
        (Axis::X, Axis::Z) => (Axis::Z, Axis::X),
        other => other,
    }
}

/// A named real phase-space function together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub id: ObservableId,
    pub kappa: Curvature,
    pub couplings: Couplings,
}

impl Observable {
    pub fn new(id: ObservableId, kappa: Curvature, couplings: Couplings) -> Self {
        Observable { id, kappa, couplings }
    }

    pub fn from_name(name: &str, kappa: Curvature, couplings: Couplings) -> Result<Self> {
        Ok(Observable::new(ObservableId::from_name(name)?, kappa, couplings))
    }

    pub fn name(&self) -> String {
        self.id.name()
    }

    pub fn eval(&self, s: &PhaseState) -> Result<f64> {
        self.value(s)
    }
}

impl PhaseFunction for Observable {
    fn label(&self) -> String {
        self.name()
    }

    fn jet(&self, s: &PhaseState) -> Result<Jet> {
        let f = Frame::new(self.kappa, s);
        let c = &self.couplings;
        use ObservableId::*;
        match self.id {
            NoetherP(a) => f.noether_p(a),
            AngularJ(a) => f.angular_j(a),
            NoetherSquared => Ok(f.noether_p(Axis::X)?.square() + f.noether_p(Axis::Y)?.square() + f.noether_p(Axis::Z)?.square()),
            AngularSquared => Ok(f.angular_j(Axis::X)?.square() + f.angular_j(Axis::Y)?.square() + f.angular_j(Axis::Z)?.square()),
            Coordinate(a) => Ok(f.coord(a)),
            Lambda => Ok(f.nonzero(f.cos_r, DEFAULT_DOMAIN_EPS, "Cos_k(r)")?.square().recip()),
            Fradkin(a, b) => f.fradkin(a, b, c),
            MReal(a) => f.noether_p(a),
            MImag(a) => Ok(f.tan_r()? * f.u(a) * c.alpha),
            AngularKJ(a) => f.angular_kj(a, c),
            Az => f.a_z(),
            V112 => f.v112(c.alpha),
            K3 => {
                let az = f.a_z()?;
                Ok(f.noether_p(Axis::Z)?.square() + az.square() * (4.0 * c.alpha * c.alpha))
            }
            K12Osc112 => f.k12_osc112(c),
            RungeLenzOsc112(a) => f.runge_lenz_osc112(a, c),
            RungeLenz(a) => f.runge_lenz(a, c.k),
            CoordLambda(a) => Ok(f.coord_nonzero(a)?.square().recip()),
            RadialRatio(a) => f.radial_ratio(a),
            RungeLenzR(a) => f.runge_lenz_r(a, c),
            NReal(a) => f.runge_lenz_r(a, c),
            NImag(a) => {
                let ka = non_negative(a, c.nonlinear(a))?;
                if ka == 0.0 {
                    return Ok(Jet::constant(0.0));
                }
                Ok(f.radial_ratio(a)? * (2.0 * ka).sqrt())
            }
            QuarticKR(a) => {
                let ka = non_negative(a, c.nonlinear(a))?;
                let r = f.runge_lenz_r(a, c)?;
                if ka == 0.0 {
                    return Ok(r.square());
                }
                Ok(r.square() + f.radial_ratio(a)?.square() * (2.0 * ka))
            }
        }
    }
}

fn non_negative(a: Axis, k: f64) -> Result<f64> {
    if k < 0.0 {
        Err(Error::NegativeCoupling { index: a.number(), value: k })
    } else {
        Ok(k)
    }
}

/// Complex observables `M_j` (oscillator) and `N_j` (Kepler with nonlinear terms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexId {
    M(Axis),
    N(Axis),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexObservable {
    pub id: ComplexId,
    pub kappa: Curvature,
    pub couplings: Couplings,
}

impl ComplexObservable {
    pub fn new(id: ComplexId, kappa: Curvature, couplings: Couplings) -> Self {
        ComplexObservable { id, kappa, couplings }
    }

    pub fn name(&self) -> String {
        match self.id {
            ComplexId::M(a) => format!("M{}", a.number()),
            ComplexId::N(a) => format!("N{}", a.number()),
        }
    }

    pub fn re(&self) -> Observable {
        let id = match self.id {
            ComplexId::M(a) => ObservableId::MReal(a),
            ComplexId::N(a) => ObservableId::NReal(a),
        };
        Observable::new(id, self.kappa, self.couplings)
    }

    pub fn im(&self) -> Observable {
        let id = match self.id {
            ComplexId::M(a) => ObservableId::MImag(a),
            ComplexId::N(a) => ObservableId::NImag(a),
        };
        Observable::new(id, self.kappa, self.couplings)
    }

    pub fn eval(&self, s: &PhaseState) -> Result<Complex64> {
        Ok(Complex64::new(self.re().value(s)?, self.im().value(s)?))
    }
}

/// Shared building blocks of every observable at one phase-space point.
pub(crate) struct Frame {
    pub kappa: Curvature,
    pub p_r: Jet,
    pub p_theta: Jet,
    pub p_phi: Jet,
    pub sin_r: Jet,
    pub cos_r: Jet,
    pub sin_t: Jet,
    pub cos_t: Jet,
    pub sin_p: Jet,
    pub cos_p: Jet,
}

impl Frame {
    pub fn new(kappa: Curvature, s: &PhaseState) -> Frame {
        let v = s.as_array();
        let r = Jet::variable(0, v[0]);
        let theta = Jet::variable(1, v[1]);
        let phi = Jet::variable(2, v[2]);
        Frame {
            kappa,
            p_r: Jet::variable(3, v[3]),
            p_theta: Jet::variable(4, v[4]),
            p_phi: Jet::variable(5, v[5]),
            sin_r: sin_k_jet(kappa, r),
            cos_r: cos_k_jet(kappa, r),
            sin_t: theta.sin(),
            cos_t: theta.cos(),
            sin_p: phi.sin(),
            cos_p: phi.cos(),
        }
    }

    pub fn nonzero(&self, j: Jet, eps: f64, what: &str) -> Result<Jet> {
        if j.value.abs() < eps {
            Err(singular(format!("{what} = {:e}", j.value)))
        } else {
            Ok(j)
        }
    }

    pub fn k(&self) -> f64 {
        self.kappa.value()
    }

    /// Direction cosines `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn u(&self, a: Axis) -> Jet {
        match a {
            Axis::X => self.sin_t * self.cos_p,
            Axis::Y => self.sin_t * self.sin_p,
            Axis::Z => self.cos_t,
        }
    }

    pub fn coord(&self, a: Axis) -> Jet {
        self.sin_r * self.u(a)
    }

    pub fn coord_nonzero(&self, a: Axis) -> Result<Jet> {
        let name = ["x_k", "y_k", "z_k"][a.index()];
        self.nonzero(self.coord(a), SINGULAR_EPS, name)
    }

    pub fn cot_r(&self) -> Result<Jet> {
        Ok(self.cos_r / self.nonzero(self.sin_r, SINGULAR_EPS, "Sin_k(r)")?)
    }

    pub fn tan_r(&self) -> Result<Jet> {
        Ok(self.sin_r / self.nonzero(self.cos_r, DEFAULT_DOMAIN_EPS, "Cos_k(r)")?)
    }

    pub fn inv_sin_t(&self) -> Result<Jet> {
        Ok(self.nonzero(self.sin_t, SINGULAR_EPS, "sin(theta)")?.recip())
    }

    pub fn kinetic(&self) -> Result<Jet> {
        let s2 = self.nonzero(self.sin_r, SINGULAR_EPS, "Sin_k(r)")?.square();
        let st2 = self.nonzero(self.sin_t, SINGULAR_EPS, "sin(theta)")?.square();
        Ok((self.p_r.square() + (self.p_theta.square() + self.p_phi.square() / st2) / s2) * 0.5)
    }

    pub fn noether_p(&self, a: Axis) -> Result<Jet> {
        let cot = self.cot_r()?;
        let p = match a {
            Axis::X => {
                let inv = self.inv_sin_t()?;
                self.u(a) * self.p_r + cot * (self.cos_t * self.cos_p * self.p_theta - self.sin_p * inv * self.p_phi)
            }
            Axis::Y => {
                let inv = self.inv_sin_t()?;
                self.u(a) * self.p_r + cot * (self.cos_t * self.sin_p * self.p_theta + self.cos_p * inv * self.p_phi)
            }
            Axis::Z => self.cos_t * self.p_r - cot * self.sin_t * self.p_theta,
        };
        Ok(p)
    }

    pub fn angular_j(&self, a: Axis) -> Result<Jet> {
        match a {
            Axis::X => {
                let cott = self.cos_t * self.inv_sin_t()?;
                Ok(-(self.sin_p * self.p_theta + cott * self.cos_p * self.p_phi))
            }
            Axis::Y => {
                let cott = self.cos_t * self.inv_sin_t()?;
                Ok(self.cos_p * self.p_theta - cott * self.sin_p * self.p_phi)
            }
            Axis::Z => Ok(self.p_phi),
        }
    }

    pub fn fradkin(&self, a: Axis, b: Axis, c: &Couplings) -> Result<Jet> {
        let t2 = self.tan_r()?.square();
        let alpha2 = c.alpha * c.alpha;
        if a == b {
            let mut out = self.noether_p(a)?.square() + t2 * self.u(a).square() * alpha2;
            let ka = c.nonlinear(a);
            if ka != 0.0 {
                let w = self.nonzero(self.tan_r()? * self.u(a), SINGULAR_EPS, "Tan_k(r) u_i")?;
                out += w.square().recip() * (2.0 * ka);
            }
            Ok(out)
        } else {
            if c.has_nonlinear_terms() {
                let (i, j) = fradkin_canonical(a, b);
                return Err(Error::UnsupportedEntry(format!(
                    "K{}{} is only defined for the pure oscillator (k1 = k2 = k3 = 0)",
                    i.number(),
                    j.number()
                )));
            }
            Ok(self.noether_p(a)? * self.noether_p(b)? + t2 * self.u(a) * self.u(b) * alpha2)
        }
    }

    /// `J_a² + 2 Σ k_b (x_c/x_b)²` over the two other axes.
    pub fn angular_kj(&self, a: Axis, c: &Couplings) -> Result<Jet> {
        let mut out = self.angular_j(a)?.square();
        let (b1, b2) = a.others();
        for (b, other) in [(b1, b2), (b2, b1)] {
            let kb = c.nonlinear(b);
            if kb != 0.0 {
                out += (self.coord(other) / self.coord_nonzero(b)?).square() * (2.0 * kb);
            }
        }
        Ok(out)
    }

    /// `Σ k_i / x_i²` over nonzero couplings.
    pub fn nonlinear_potential(&self, c: &Couplings, axes: &[Axis]) -> Result<Jet> {
        let mut out = Jet::constant(0.0);
        for &a in axes {
            let ka = c.nonlinear(a);
            if ka != 0.0 {
                out += self.coord_nonzero(a)?.square().recip() * ka;
            }
        }
        Ok(out)
    }

    pub fn a_z(&self) -> Result<Jet> {
        let w = self.tan_r()? * self.cos_t;
        let den = self.nonzero(1.0 - w.square() * self.k(), SINGULAR_EPS, "1 - κ(Tan_k(r) cosθ)²")?;
        Ok(w / den)
    }

    /// `x_κ² + y_κ²` and `1 − κ(x_κ² + y_κ²)`.
    fn planar(&self) -> Result<(Jet, Jet)> {
        let rho2 = self.coord(Axis::X).square() + self.coord(Axis::Y).square();
        let den = self.nonzero(1.0 - rho2 * self.k(), SINGULAR_EPS, "1 - κ(x_k² + y_k²)")?;
        Ok((rho2, den))
    }

    pub fn v112(&self, alpha: f64) -> Result<Jet> {
        let (rho2, den) = self.planar()?;
        let az = self.a_z()?;
        Ok((rho2 + az.square() * 4.0) / den * (0.5 * alpha * alpha))
    }

    pub fn k12_osc112(&self, c: &Couplings) -> Result<Jet> {
        let k = self.k();
        let (rho2, den) = self.planar()?;
        let az = self.a_z()?;
        let mut out = self.noether_p(Axis::X)?.square()
            + self.angular_j(Axis::X)?.square() * k
            + self.noether_p(Axis::Y)?.square()
            + self.angular_j(Axis::Y)?.square() * k
            + (1.0 + az.square() * (4.0 * k)) * (rho2 / den) * (c.alpha * c.alpha);
        if c.k2 != 0.0 {
            let x = self.coord(Axis::X);
            out += (1.0 - x.square() * k) / self.coord_nonzero(Axis::Y)?.square() * (2.0 * c.k2);
        }
        if c.k1 != 0.0 {
            let y = self.coord(Axis::Y);
            out += (1.0 - y.square() * k) / self.coord_nonzero(Axis::X)?.square() * (2.0 * c.k1);
        }
        Ok(out)
    }

    pub fn runge_lenz_osc112(&self, a: Axis, c: &Couplings) -> Result<Jet> {
        let cos_t = self.nonzero(self.cos_t, SINGULAR_EPS, "cos(theta)")?;
        let tan_t = self.sin_t / cos_t;
        let cos_r = self.nonzero(self.cos_r, DEFAULT_DOMAIN_EPS, "Cos_k(r)")?;
        let az2 = self.a_z()?.square();
        let z = self.coord(Axis::Z);
        let alpha2 = c.alpha * c.alpha;
        match a {
            Axis::X => {
                let mut out = -(self.noether_p(Axis::X)? * self.angular_j(Axis::Y)?)
                    + tan_t * self.cos_p / cos_r * az2 * self.coord(Axis::X) * alpha2;
                if c.k1 != 0.0 {
                    out = out - self.cos_r * z / self.coord_nonzero(Axis::X)?.square() * (2.0 * c.k1);
                }
                Ok(out)
            }
            Axis::Y => {
                let mut out = self.noether_p(Axis::Y)? * self.angular_j(Axis::X)?
                    + tan_t * self.sin_p / cos_r * az2 * self.coord(Axis::Y) * alpha2;
                if c.k2 != 0.0 {
                    out = out - self.cos_r * z / self.coord_nonzero(Axis::Y)?.square() * (2.0 * c.k2);
                }
                Ok(out)
            }
            Axis::Z => Err(Error::UnknownName("KRL3_112".into())),
        }
    }

    /// `(P × J)_a + k u_a`.
    pub fn runge_lenz(&self, a: Axis, k: f64) -> Result<Jet> {
        let (b, c) = a.others();
        let cross = self.noether_p(b)? * self.angular_j(c)? - self.noether_p(c)? * self.angular_j(b)?;
        Ok(cross + self.u(a) * k)
    }

    pub fn radial_ratio(&self, a: Axis) -> Result<Jet> {
        Ok(self.p_r * self.sin_r / self.coord_nonzero(a)?)
    }

    pub fn runge_lenz_r(&self, a: Axis, c: &Couplings) -> Result<Jet> {
        let rl = self.runge_lenz(a, c.k)?;
        if !c.has_nonlinear_terms() {
            return Ok(rl);
        }
        let sum = self.nonlinear_potential(c, &Axis::ALL)?;
        Ok(rl + self.cos_r * self.sin_r * self.u(a) * sum * 2.0)
    }
}

pub fn noether_p(i: usize, kappa: Curvature, s: &PhaseState) -> Result<f64> {
    Observable::new(ObservableId::NoetherP(Axis::from_number(i)?), kappa, Couplings::default()).value(s)
}

pub fn angular_j(i: usize, s: &PhaseState) -> Result<f64> {
    Observable::new(ObservableId::AngularJ(Axis::from_number(i)?), Curvature::EUCLIDEAN, Couplings::default()).value(s)
}

/// `(x_κ, y_κ, z_κ)`.
pub fn kappa_cartesian(kappa: Curvature, q: &ConfigPoint) -> (f64, f64, f64) {
    let s = sin_k(kappa, q.r);
    let (st, ct) = q.theta.sin_cos();
    let (sp, cp) = q.phi.sin_cos();
    (s * st * cp, s * st * sp, s * ct)
}

pub fn fradkin_k(i: usize, j: usize, kappa: Curvature, couplings: Couplings, s: &PhaseState) -> Result<f64> {
    let id = ObservableId::Fradkin(Axis::from_number(i)?, Axis::from_number(j)?);
    Observable::new(id, kappa, couplings).value(s)
}

pub fn complex_m(j: usize, kappa: Curvature, alpha: f64, s: &PhaseState) -> Result<Complex64> {
    let c = Couplings { alpha, ..Default::default() };
    ComplexObservable::new(ComplexId::M(Axis::from_number(j)?), kappa, c).eval(s)
}

pub fn sw_kj(i: usize, kappa: Curvature, k1: f64, k2: f64, k3: f64, s: &PhaseState) -> Result<f64> {
    let c = Couplings { k1, k2, k3, ..Default::default() };
    Observable::new(ObservableId::AngularKJ(Axis::from_number(i)?), kappa, c).value(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Osc112Values {
    pub a_z: f64,
    pub v112: f64,
    pub k3: f64,
    pub kj3: f64,
    pub k12: f64,
    pub krl1: f64,
    pub krl2: f64,
}

pub fn osc112_observables(kappa: Curvature, alpha: f64, k1: f64, k2: f64, s: &PhaseState) -> Result<Osc112Values> {
    let c = Couplings { alpha, k1, k2, ..Default::default() };
    let v = |id| Observable::new(id, kappa, c).value(s);
    Ok(Osc112Values {
        a_z: v(ObservableId::Az)?,
        v112: v(ObservableId::V112)?,
        k3: v(ObservableId::K3)?,
        kj3: v(ObservableId::AngularKJ(Axis::Z))?,
        k12: v(ObservableId::K12Osc112)?,
        krl1: v(ObservableId::RungeLenzOsc112(Axis::X))?,
        krl2: v(ObservableId::RungeLenzOsc112(Axis::Y))?,
    })
}

pub fn kepler_rl(i: usize, kappa: Curvature, k: f64, s: &PhaseState) -> Result<f64> {
    let c = Couplings { k, ..Default::default() };
    Observable::new(ObservableId::RungeLenz(Axis::from_number(i)?), kappa, c).value(s)
}

pub fn k123_r(i: usize, kappa: Curvature, couplings: Couplings, s: &PhaseState) -> Result<f64> {
    Observable::new(ObservableId::RungeLenzR(Axis::from_number(i)?), kappa, couplings).value(s)
}

pub fn k123_n(i: usize, kappa: Curvature, couplings: Couplings, s: &PhaseState) -> Result<Complex64> {
    ComplexObservable::new(ComplexId::N(Axis::from_number(i)?), kappa, couplings).eval(s)
}

pub fn k123_kr(i: usize, kappa: Curvature, couplings: Couplings, s: &PhaseState) -> Result<f64> {
    Observable::new(ObservableId::QuarticKR(Axis::from_number(i)?), kappa, couplings).value(s)
}

pub fn analytic_gradient(obs: &dyn PhaseFunction, s: &PhaseState) -> Result<Gradient> {
    obs.gradient(s)
}

/// Central-difference gradient of `f`, step `h` in every coordinate.
pub fn fd_gradient(f: &dyn PhaseFunction, s: &PhaseState, h: f64) -> Result<Gradient> {
    let base = s.as_array();
    let mut g = [0.0; 6];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut plus = base;
        let mut minus = base;
        plus[i] += h;
        minus[i] -= h;
        *gi = (f.value(&PhaseState::from_array(plus))? - f.value(&PhaseState::from_array(minus))?) / (2.0 * h);
    }
    Ok(g)
}
