//! The six Hamiltonian systems: energy, Hamilton's equations, potential
//! profiles along a ray, the alternative-chart Hamiltonians and the catalog of
//! first integrals with their involution and independence sets.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{singular, Error, Result};
use crate::geometry::{Chart, ChartState, PhaseState, SINGULAR_EPS};
use crate::jet::{Gradient, Jet};
use crate::observables::{Axis, Couplings, Frame, Observable, ObservableId, PhaseFunction};
use crate::kappa::{Curvature, DEFAULT_DOMAIN_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SystemId {
    #[serde(rename = "free")]
    FreeGeodesic,
    #[serde(rename = "oscillator")]
    Oscillator,
    #[serde(rename = "sw")]
    SmorodinskyWinternitz,
    #[serde(rename = "osc112")]
    Oscillator112,
    #[serde(rename = "kepler")]
    Kepler,
    #[serde(rename = "kepler123")]
    Kepler123,
}

impl SystemId {
    pub const ALL: [SystemId; 6] = [
        SystemId::FreeGeodesic,
        SystemId::Oscillator,
        SystemId::SmorodinskyWinternitz,
        SystemId::Oscillator112,
        SystemId::Kepler,
        SystemId::Kepler123,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::FreeGeodesic => "free",
            SystemId::Oscillator => "oscillator",
            SystemId::SmorodinskyWinternitz => "sw",
            SystemId::Oscillator112 => "osc112",
            SystemId::Kepler => "kepler",
            SystemId::Kepler123 => "kepler123",
        }
    }

    pub fn from_name(name: &str) -> Result<SystemId> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.name() == name)
            .ok_or_else(|| Error::UnknownName(format!("system '{name}'")))
    }

    pub fn description(self) -> &'static str {
        match self {
            SystemId::FreeGeodesic => "geodesic motion",
            SystemId::Oscillator => "isotropic harmonic oscillator",
            SystemId::SmorodinskyWinternitz => "oscillator with k1/x^2 + k2/y^2 + k3/z^2 terms",
            SystemId::Oscillator112 => "1:1:2 oscillator with k1/x^2 + k2/y^2 terms",
            SystemId::Kepler => "Kepler problem",
            SystemId::Kepler123 => "Kepler problem with k1/x^2 + k2/y^2 + k3/z^2 terms",
        }
    }

    /// Parameter names besides `kappa`.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            SystemId::FreeGeodesic => &[],
            SystemId::Oscillator => &["alpha"],
            SystemId::SmorodinskyWinternitz => &["alpha", "k1", "k2", "k3"],
            SystemId::Oscillator112 => &["alpha", "k1", "k2"],
            SystemId::Kepler => &["k"],
            SystemId::Kepler123 => &["k", "k1", "k2", "k3"],
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A system together with its parameter values. Parameters the system does
/// not use are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub id: SystemId,
    pub kappa: Curvature,
    pub couplings: Couplings,
}

fn param_value(c: &Couplings, name: &str) -> f64 {
    match name {
        "alpha" => c.alpha,
        "k" => c.k,
        "k1" => c.k1,
        "k2" => c.k2,
        "k3" => c.k3,
        _ => 0.0,
    }
}

impl SystemSpec {
    pub fn new(id: SystemId, kappa: Curvature, couplings: Couplings) -> Result<Self> {
        let used = id.parameters();
        for name in ["alpha", "k", "k1", "k2", "k3"] {
            let v = param_value(&couplings, name);
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
            if !used.contains(&name) && v != 0.0 {
                return Err(Error::InvalidParameter(format!("system '{id}' takes no parameter '{name}'")));
            }
        }
        if couplings.alpha < 0.0 {
            return Err(Error::InvalidParameter(format!("alpha = {} must be >= 0", couplings.alpha)));
        }
        if matches!(id, SystemId::SmorodinskyWinternitz | SystemId::Oscillator112) {
            for a in Axis::ALL {
                let v = couplings.nonlinear(a);
                if v < 0.0 {
                    return Err(Error::NegativeCoupling { index: a.number(), value: v });
                }
            }
        }
        Ok(SystemSpec { id, kappa, couplings })
    }

    /// From a `name -> value` map; unknown or unused names are rejected.
    pub fn from_params(id: SystemId, kappa: Curvature, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut c = Couplings::default();
        for (name, &v) in params {
            if !id.parameters().contains(&name.as_str()) {
                return Err(Error::InvalidParameter(format!("system '{id}' takes no parameter '{name}'")));
            }
            match name.as_str() {
                "alpha" => c.alpha = v,
                "k" => c.k = v,
                "k1" => c.k1 = v,
                "k2" => c.k2 = v,
                "k3" => c.k3 = v,
                _ => unreachable!(),
            }
        }
        SystemSpec::new(id, kappa, c)
    }

    pub fn free(kappa: f64) -> Result<Self> {
        SystemSpec::new(SystemId::FreeGeodesic, Curvature::new(kappa)?, Couplings::default())
    }

    pub fn oscillator(kappa: f64, alpha: f64) -> Result<Self> {
        let c = Couplings { alpha, ..Default::default() };
        SystemSpec::new(SystemId::Oscillator, Curvature::new(kappa)?, c)
    }

    pub fn sw(kappa: f64, alpha: f64, k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let c = Couplings { alpha, k1, k2, k3, ..Default::default() };
        SystemSpec::new(SystemId::SmorodinskyWinternitz, Curvature::new(kappa)?, c)
    }

    pub fn osc112(kappa: f64, alpha: f64, k1: f64, k2: f64) -> Result<Self> {
        let c = Couplings { alpha, k1, k2, ..Default::default() };
        SystemSpec::new(SystemId::Oscillator112, Curvature::new(kappa)?, c)
    }

    pub fn kepler(kappa: f64, k: f64) -> Result<Self> {
        let c = Couplings { k, ..Default::default() };
        SystemSpec::new(SystemId::Kepler, Curvature::new(kappa)?, c)
    }

    pub fn kepler123(kappa: f64, k: f64, k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let c = Couplings { k, k1, k2, k3, ..Default::default() };
        SystemSpec::new(SystemId::Kepler123, Curvature::new(kappa)?, c)
    }

    /// The parameters the system uses, by name.
    pub fn params(&self) -> BTreeMap<String, f64> {
        self.id.parameters().iter().map(|&n| (n.to_string(), param_value(&self.couplings, n))).collect()
    }

    pub fn with_kappa(&self, kappa: Curvature) -> Self {
        SystemSpec { kappa, ..*self }
    }

    pub fn observable(&self, id: ObservableId) -> Observable {
        Observable::new(id, self.kappa, self.couplings)
    }

    pub fn observable_by_name(&self, name: &str) -> Result<Observable> {
        Observable::from_name(name, self.kappa, self.couplings)
    }

    pub fn hamiltonian_fn(&self) -> Hamiltonian {
        Hamiltonian(*self)
    }

    pub fn hamiltonian(&self, s: &PhaseState) -> Result<f64> {
        Ok(self.hamiltonian_jet(s)?.value)
    }

    pub fn potential(&self, s: &PhaseState) -> Result<f64> {
        Ok(potential_jet(self, &Frame::new(self.kappa, s), &Axis::ALL)?.value)
    }

    pub fn hamiltonian_jet(&self, s: &PhaseState) -> Result<Jet> {
        let f = Frame::new(self.kappa, s);
        Ok(f.kinetic()? + potential_jet(self, &f, &Axis::ALL)?)
    }

    /// `(∂H/∂p, −∂H/∂q)`.
    pub fn hamilton_rhs(&self, s: &PhaseState) -> Result<[f64; 6]> {
        Ok(canonical_field(&self.hamiltonian_jet(s)?.grad))
    }

    /// `V` along the ray `θ = π/2`, `φ = π/4` at `n` evenly spaced radii.
    ///
    /// `z_κ` vanishes on this ray, so a `k3/z_κ²` term is left out. Radii
    /// where the potential is undefined give rows with `v = None`.
    pub fn potential_profile(&self, r_min: f64, r_max: f64, n: usize) -> Result<Vec<ProfileRow>> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_max < r_min {
            return Err(Error::InvalidParameter(format!("bad radial range [{r_min}, {r_max}]")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("profile needs at least one sample".into()));
        }
        let axes = [Axis::X, Axis::Y];
        let rows = (0..n)
            .map(|i| {
                let r = if n == 1 { r_min } else { r_min + (r_max - r_min) * i as f64 / (n - 1) as f64 };
                let s = PhaseState::new(r, std::f64::consts::FRAC_PI_2, FRAC_PI_4, 0.0, 0.0, 0.0);
                let v = s
                    .q
                    .validate(self.kappa)
                    .and_then(|_| potential_jet(self, &Frame::new(self.kappa, &s), &axes))
                    .ok()
                    .map(|j| j.value)
                    .filter(|v| v.is_finite());
                ProfileRow { r, v }
            })
            .collect();
        Ok(rows)
    }

    /// Hamiltonian in an alternative radial chart, as a function of
    /// `[radial, θ, φ, p_radial, p_θ, p_φ]`. Available for the free system,
    /// the oscillator and the Kepler problem.
    pub fn chart_hamiltonian_jet(&self, chart: Chart, y: &[f64; 6]) -> Result<Jet> {
        if chart == Chart::Geodesic {
            return self.hamiltonian_jet(&PhaseState::from_array(*y));
        }
        let k = self.kappa.value();
        let v: Vec<Jet> = (0..6).map(|i| Jet::variable(i, y[i])).collect();
        let (x, th, p_x, p_t, p_p) = (v[0], v[1], v[3], v[4], v[5]);
        let st = th.sin();
        if st.value.abs() < SINGULAR_EPS || x.value.abs() < SINGULAR_EPS {
            return Err(singular(format!("chart state {y:?}")));
        }
        let ang = p_t.square() + p_p.square() / st.square();
        let x2 = x.square();
        let (kinetic, potential) = match chart {
            Chart::Rho => {
                let w = 1.0 - x2 * k;
                if w.value <= DEFAULT_DOMAIN_EPS {
                    return Err(singular(format!("1 - κρ² = {:e}", w.value)));
                }
                let kin = (w * p_x.square() + ang / x2) * 0.5;
                let pot = match self.id {
                    SystemId::FreeGeodesic => Jet::constant(0.0),
                    SystemId::Oscillator => x2 / w * (0.5 * self.couplings.alpha.powi(2)),
                    SystemId::Kepler => w.sqrt() / x * self.couplings.k,
                    _ => return Err(chart_unsupported(self.id)),
                };
                (kin, pot)
            }
            Chart::Tangent => {
                let w = 1.0 + x2 * k;
                let kin = (w.square() * p_x.square() + w * ang / x2) * 0.5;
                let pot = match self.id {
                    SystemId::FreeGeodesic => Jet::constant(0.0),
                    SystemId::Oscillator => x2 * (0.5 * self.couplings.alpha.powi(2)),
                    SystemId::Kepler => x.recip() * self.couplings.k,
                    _ => return Err(chart_unsupported(self.id)),
                };
                (kin, pot)
            }
            Chart::Geodesic => unreachable!(),
        };
        Ok(kinetic + potential)
    }

    pub fn chart_hamiltonian(&self, cs: &ChartState) -> Result<f64> {
        Ok(self.chart_hamiltonian_jet(cs.chart, &cs.as_array())?.value)
    }

    pub fn chart_rhs(&self, chart: Chart, y: &[f64; 6]) -> Result<[f64; 6]> {
        Ok(canonical_field(&self.chart_hamiltonian_jet(chart, y)?.grad))
    }

    pub fn catalog(&self) -> Catalog {
        build_catalog(self)
    }
}

fn chart_unsupported(id: SystemId) -> Error {
    Error::UnsupportedEntry(format!("no chart Hamiltonian for system '{id}'"))
}

pub(crate) fn canonical_field(g: &Gradient) -> [f64; 6] {
    [g[3], g[4], g[5], -g[0], -g[1], -g[2]]
}

fn potential_jet(spec: &SystemSpec, f: &Frame, axes: &[Axis]) -> Result<Jet> {
    let c = &spec.couplings;
    let half_a2 = 0.5 * c.alpha * c.alpha;
    let v = match spec.id {
        SystemId::FreeGeodesic => Jet::constant(0.0),
        SystemId::Oscillator => f.tan_r()?.square() * half_a2,
        SystemId::SmorodinskyWinternitz => f.tan_r()?.square() * half_a2 + f.nonlinear_potential(c, axes)?,
        SystemId::Oscillator112 => {
            let planar: Vec<Axis> = axes.iter().copied().filter(|&a| a != Axis::Z).collect();
            f.v112(c.alpha)? + f.nonlinear_potential(c, &planar)?
        }
        SystemId::Kepler => kepler_term(f, c.k)?,
        SystemId::Kepler123 => kepler_term(f, c.k)? + f.nonlinear_potential(c, axes)?,
    };
    Ok(v)
}

// k Cos/Sin rather than k/Tan: finite on the equator of the sphere.
fn kepler_term(f: &Frame, k: f64) -> Result<Jet> {
    Ok(f.cot_r()? * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub v: Option<f64>,
}

/// The Hamiltonian of a system as a phase-space function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(pub SystemSpec);

impl PhaseFunction for Hamiltonian {
    fn label(&self) -> String {
        "H".into()
    }

    fn jet(&self, s: &PhaseState) -> Result<Jet> {
        self.0.hamiltonian_jet(s)
    }
}

/// Phase-space functions built from observables and the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Obs(Observable),
    Hamiltonian(SystemSpec),
    Square(Box<Expr>),
    Sum(Vec<(f64, Expr)>),
}

impl Expr {
    pub fn obs(spec: &SystemSpec, id: ObservableId) -> Expr {
        Expr::Obs(spec.observable(id))
    }

    pub fn square(self) -> Expr {
        Expr::Square(Box::new(self))
    }

    pub fn sum(terms: Vec<(f64, Expr)>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn name(&self) -> String {
        match self {
            Expr::Obs(o) => o.name(),
            Expr::Hamiltonian(_) => "H".into(),
            Expr::Square(e) => format!("{}^2", e.name()),
            Expr::Sum(terms) => terms
                .iter()
                .map(|(c, e)| if *c == 1.0 { e.name() } else { format!("{c}*{}", e.name()) })
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

impl PhaseFunction for Expr {
    fn label(&self) -> String {
        self.name()
    }

    fn jet(&self, s: &PhaseState) -> Result<Jet> {
        match self {
            Expr::Obs(o) => o.jet(s),
            Expr::Hamiltonian(spec) => spec.hamiltonian_jet(s),
            Expr::Square(e) => Ok(e.jet(s)?.square()),
            Expr::Sum(terms) => {
                let mut out = Jet::constant(0.0);
                for (c, e) in terms {
                    out += e.jet(s)? * *c;
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSet<T> {
    pub name: String,
    pub members: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub integrals: Vec<Observable>,
    pub involution_sets: Vec<NamedSet<Expr>>,
    pub independence_sets: Vec<NamedSet<Observable>>,
}

impl Catalog {
    pub fn integral_names(&self) -> Vec<String> {
        self.integrals.iter().map(|o| o.name()).collect()
    }
}

fn set<T>(name: impl Into<String>, members: Vec<T>) -> NamedSet<T> {
    NamedSet { name: name.into(), members }
}

fn build_catalog(spec: &SystemSpec) -> Catalog {
    use ObservableId::*;
    let o = |id| spec.observable(id);
    let e = |id| Expr::obs(spec, id);
    let h = Expr::Hamiltonian(*spec);
    let k = spec.kappa.value();
    let axes = Axis::ALL;
    let angular_triplet = || set("H, Jsq, J3", vec![h.clone(), e(AngularSquared), e(AngularJ(Axis::Z))]);
    let diag = |a: Axis| Fradkin(a, a);

    // (K_ii, L_i, K_jj + K_kk + κ(L_j + L_k)) with L_i = J_i² or KJ_i
    let fradkin_triplets = |angular: &dyn Fn(Axis) -> Expr| -> Vec<NamedSet<Expr>> {
        axes.iter()
            .map(|&a| {
                let (b, c) = a.others();
                let rest = Expr::sum(vec![(1.0, e(diag(b))), (1.0, e(diag(c))), (k, angular(b)), (k, angular(c))]);
                let first = angular(a);
                set(format!("K{0}{0} triplet", a.number()), vec![e(diag(a)), first, rest])
            })
            .collect()
    };
    let kj_triplets = || -> Vec<NamedSet<Expr>> {
        axes.iter()
            .map(|&a| {
                let (b, c) = a.others();
                let pair = Expr::sum(vec![(1.0, e(AngularKJ(b))), (1.0, e(AngularKJ(c)))]);
                set(format!("H, KJ{}, KJ{} + KJ{}", a.number(), b.number(), c.number()), vec![h.clone(), e(AngularKJ(a)), pair])
            })
            .collect()
    };

    match spec.id {
        SystemId::FreeGeodesic => Catalog {
            integrals: axes.map(|a| o(NoetherP(a))).into_iter().chain(axes.map(|a| o(AngularJ(a)))).collect(),
            involution_sets: vec![angular_triplet()],
            independence_sets: vec![set(
                "J1 J2 J3 P1 P2",
                vec![o(AngularJ(Axis::X)), o(AngularJ(Axis::Y)), o(AngularJ(Axis::Z)), o(NoetherP(Axis::X)), o(NoetherP(Axis::Y))],
            )],
        },
        SystemId::Oscillator => {
            let mut involution_sets = vec![angular_triplet()];
            involution_sets.extend(fradkin_triplets(&|a| e(AngularJ(a)).square()));
            Catalog {
                integrals: axes
                    .map(|a| o(AngularJ(a)))
                    .into_iter()
                    .chain(crate::observables::FRADKIN_ENTRIES.map(|(a, b)| o(Fradkin(a, b))))
                    .collect(),
                involution_sets,
                independence_sets: vec![set(
                    // K11 K22 - K12^2 = alpha^2 J3^2 rules out {K11, K22, K33, J3, K12}
                    "K11 K22 K33 J1 J2",
                    vec![o(diag(Axis::X)), o(diag(Axis::Y)), o(diag(Axis::Z)), o(AngularJ(Axis::X)), o(AngularJ(Axis::Y))],
                )],
            }
        }
        SystemId::SmorodinskyWinternitz => {
            let mut involution_sets = kj_triplets();
            involution_sets.extend(fradkin_triplets(&|a| e(AngularKJ(a))));
            Catalog {
                integrals: axes.map(|a| o(AngularKJ(a))).into_iter().chain(axes.map(|a| o(diag(a)))).collect(),
                involution_sets,
                independence_sets: vec![set(
                    "KJ1 KJ2 KJ3 K11 K22",
                    vec![o(AngularKJ(Axis::X)), o(AngularKJ(Axis::Y)), o(AngularKJ(Axis::Z)), o(diag(Axis::X)), o(diag(Axis::Y))],
                )],
            }
        }
        SystemId::Oscillator112 => {
            let all = vec![o(K3), o(AngularKJ(Axis::Z)), o(K12Osc112), o(RungeLenzOsc112(Axis::X)), o(RungeLenzOsc112(Axis::Y))];
            Catalog {
                integrals: all.clone(),
                involution_sets: vec![set("H, K3, KJ3, K12_112", vec![h.clone(), e(K3), e(AngularKJ(Axis::Z)), e(K12Osc112)])],
                independence_sets: vec![set("K3 KJ3 K12_112 KRL1_112 KRL2_112", all)],
            }
        }
        SystemId::Kepler => Catalog {
            integrals: axes.map(|a| o(AngularJ(a))).into_iter().chain(axes.map(|a| o(RungeLenz(a)))).collect(),
            involution_sets: vec![angular_triplet()],
            independence_sets: vec![set(
                "J1 J2 J3 KRL1 KRL2",
                vec![o(AngularJ(Axis::X)), o(AngularJ(Axis::Y)), o(AngularJ(Axis::Z)), o(RungeLenz(Axis::X)), o(RungeLenz(Axis::Y))],
            )],
        },
        SystemId::Kepler123 => {
            // KR_i needs k_i >= 0
            let quartic: Vec<Observable> =
                axes.iter().filter(|&&a| spec.couplings.nonlinear(a) >= 0.0).map(|&a| o(QuarticKR(a))).collect();
            let mut independence = vec![o(AngularKJ(Axis::X)), o(AngularKJ(Axis::Y)), o(AngularKJ(Axis::Z))];
            independence.extend(quartic.iter().take(2).copied());
            let independence_sets = if independence.len() == 5 {
                let name = independence.iter().map(|o| o.name()).collect::<Vec<_>>().join(" ");
                vec![set(name, independence)]
            } else {
                Vec::new()
            };
            Catalog {
                integrals: axes.map(|a| o(AngularKJ(a))).into_iter().chain(quartic).collect(),
                involution_sets: kj_triplets(),
                independence_sets,
            }
        }
    }
}
