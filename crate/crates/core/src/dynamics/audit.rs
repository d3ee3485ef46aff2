//! Tables of Poisson-bracket and algebraic identities per system, and the
//! algebraic properties of the curved Fradkin matrix.
//!
//! Bracket identities are scored by
//! `|computed − expected| / max(1, Σ|bracket products| + |expected|)`,
//! i.e. absolutely when the terms are of order one and relative to the
//! size of the cancelling terms otherwise. Fradkin properties are scored
//! relative to the sum of the absolute values of all terms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::PhaseState;
use crate::kappa::{cos_k, sin_k, Curvature};
use crate::observables::{Axis, Couplings, Observable, ObservableId, PhaseFunction};
use crate::sampling::{rng, sample_state, stream_id};
use crate::systems::{Expr, SystemId, SystemSpec};

use super::bracket::bracket_with_scale;

/// Pass threshold for identity residuals.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Default number of sampled states per identity.
pub const DEFAULT_SAMPLES: usize = 50;

const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub computed: f64,
    pub expected: f64,
    /// Normalisation of the residual.
    pub scale: f64,
}

impl Evaluation {
    pub fn abs_residual(&self) -> f64 {
        (self.computed - self.expected).abs()
    }

    pub fn residual(&self) -> f64 {
        self.abs_residual() / self.scale.max(1.0)
    }
}

type EvalFn = Box<dyn Fn(&PhaseState, &[f64; 3]) -> Result<Evaluation> + Send + Sync>;

/// One displayed identity, possibly depending on three arbitrary constants.
pub struct Identity {
    pub name: String,
    pub parametrized: bool,
    eval: EvalFn,
}

impl Identity {
    pub fn evaluate(&self, s: &PhaseState, c: &[f64; 3]) -> Result<Evaluation> {
        (self.eval)(s, c)
    }
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity").field("name", &self.name).field("parametrized", &self.parametrized).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketResidual {
    pub identity: String,
    pub state: PhaseState,
    pub expected: f64,
    pub computed: f64,
    /// `|computed − expected|`.
    pub residual: f64,
    /// The residual after normalisation (see the module docs).
    pub scaled_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub samples: usize,
    pub max_scaled_residual: f64,
    pub max_abs_residual: f64,
    pub worst: BracketResidual,
    pub passed: bool,
}

fn ident<F>(name: impl Into<String>, f: F) -> Identity
where
    F: Fn(&PhaseState, &[f64; 3]) -> Result<Evaluation> + Send + Sync + 'static,
{
    Identity { name: name.into(), parametrized: false, eval: Box::new(f) }
}

fn ident_c<F>(name: impl Into<String>, f: F) -> Identity
where
    F: Fn(&PhaseState, &[f64; 3]) -> Result<Evaluation> + Send + Sync + 'static,
{
    Identity { name: name.into(), parametrized: true, eval: Box::new(f) }
}

fn bracket_eval(f: &dyn PhaseFunction, g: &dyn PhaseFunction, expected: f64, s: &PhaseState) -> Result<Evaluation> {
    let b = bracket_with_scale(f, g, s)?;
    Ok(Evaluation { computed: b.value, expected, scale: b.scale + expected.abs() })
}

fn equality(computed: f64, expected: f64, scale: f64) -> Evaluation {
    Evaluation { computed, expected, scale }
}

fn n(a: Axis) -> usize {
    a.number()
}

/// `{F, H} = 0`.
fn commutes_with_h(spec: SystemSpec, f: Expr) -> Identity {
    let name = format!("{{{}, H}} = 0", f.name());
    let h = spec.hamiltonian_fn();
    ident(name, move |s, _| bracket_eval(&f, &h, 0.0, s))
}

fn commute(f: Expr, g: Expr) -> Identity {
    let name = format!("{{{}, {}}} = 0", f.name(), g.name());
    ident(name, move |s, _| bracket_eval(&f, &g, 0.0, s))
}

/// `{J_a, Σ c_i F_i}` equals the rotation of the vector `F`.
fn rotation_family(spec: SystemSpec, name_f: &str, make: fn(Axis) -> ObservableId) -> Vec<Identity> {
    Axis::ALL
        .iter()
        .map(|&a| {
            let (b, c) = a.others();
            let name = format!("{{J{0}, c1 {1}1 + c2 {1}2 + c3 {1}3}} = c{2} {1}{3} - c{3} {1}{2}", n(a), name_f, n(b), n(c));
            ident_c(name, move |s, cs| {
                let j = spec.observable(ObservableId::AngularJ(a));
                let comb = Expr::sum(Axis::ALL.iter().map(|&i| (cs[i.index()], Expr::obs(&spec, make(i)))).collect());
                let fc = spec.observable(make(c)).value(s)?;
                let fb = spec.observable(make(b)).value(s)?;
                let expected = cs[b.index()] * fc - cs[c.index()] * fb;
                bracket_eval(&j, &comb, expected, s)
            })
        })
        .collect()
}

fn involution_pairs(spec: &SystemSpec) -> Vec<Identity> {
    let mut out = Vec::new();
    for set in spec.catalog().involution_sets {
        let m = &set.members;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                out.push(commute(m[i].clone(), m[j].clone()));
            }
        }
    }
    out
}

fn sum_p_squared(kappa: Curvature, s: &PhaseState) -> f64 {
    let (sr, cr) = (sin_k(kappa, s.q.r), cos_k(kappa, s.q.r));
    let st = s.q.theta.sin();
    s.p_r * s.p_r + (cr * cr / (sr * sr)) * (s.p_theta * s.p_theta + s.p_phi * s.p_phi / (st * st))
}

fn sum_j_squared(s: &PhaseState) -> f64 {
    let st = s.q.theta.sin();
    s.p_theta * s.p_theta + s.p_phi * s.p_phi / (st * st)
}

fn free_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let kappa = spec.kappa;
    let k = kappa.value();
    let mut v = Vec::new();
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, NoetherP(a))));
    }
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, AngularJ(a))));
    }
    for a in Axis::ALL {
        let (b, c) = a.others();
        // {P_b, P_c} = κ J_a
        v.push(ident(format!("{{P{}, P{}}} = kappa J{}", n(b), n(c), n(a)), move |s, _| {
            let expected = k * spec.observable(AngularJ(a)).value(s)?;
            bracket_eval(&spec.observable(NoetherP(b)), &spec.observable(NoetherP(c)), expected, s)
        }));
    }
    v.extend(rotation_family(spec, "P", NoetherP));
    v.extend(involution_pairs(&spec));
    v.push(ident("P1^2 + P2^2 + P3^2 = p_r^2 + (Cos/Sin)^2 (p_theta^2 + p_phi^2/sin^2 theta)", move |s, _| {
        let p = spec.observable(NoetherSquared).value(s)?;
        let e = sum_p_squared(kappa, s);
        Ok(equality(p, e, p.abs() + e.abs()))
    }));
    v.push(ident("J1^2 + J2^2 + J3^2 = p_theta^2 + p_phi^2/sin^2 theta", move |s, _| {
        let j = spec.observable(AngularSquared).value(s)?;
        let e = sum_j_squared(s);
        Ok(equality(j, e, j.abs() + e.abs()))
    }));
    v.push(ident("H = (P1^2 + P2^2 + P3^2 + kappa (J1^2 + J2^2 + J3^2))/2", move |s, _| {
        let p = spec.observable(NoetherSquared).value(s)?;
        let j = spec.observable(AngularSquared).value(s)?;
        let h = spec.hamiltonian(s)?;
        Ok(equality(0.5 * (p + k * j), h, 0.5 * (p.abs() + (k * j).abs()) + h.abs()))
    }));
    for a in Axis::ALL {
        let name = format!("{{{}_k, P{}}} = Cos_k(r)", ["x", "y", "z"][a.index()], n(a));
        v.push(ident(name, move |s, _| {
            let expected = cos_k(kappa, s.q.r);
            bracket_eval(&spec.observable(Coordinate(a)), &spec.observable(NoetherP(a)), expected, s)
        }));
    }
    v.push(ident("x_k P1 + y_k P2 + z_k P3 = p_r Sin_k(r)", move |s, _| {
        let mut lhs = 0.0;
        let mut scale = 0.0;
        for a in Axis::ALL {
            let t = spec.observable(Coordinate(a)).value(s)? * spec.observable(NoetherP(a)).value(s)?;
            lhs += t;
            scale += t.abs();
        }
        let e = s.p_r * sin_k(kappa, s.q.r);
        Ok(equality(lhs, e, scale + e.abs()))
    }));
    v
}

fn oscillator_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let k = spec.kappa.value();
    let alpha = spec.couplings.alpha;
    let mut v = Vec::new();
    for (a, b) in crate::observables::FRADKIN_ENTRIES {
        v.push(commutes_with_h(spec, Expr::obs(&spec, Fradkin(a, b))));
    }
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, AngularJ(a))));
    }
    for a in Axis::ALL {
        v.push(commute(Expr::obs(&spec, Fradkin(a, a)), Expr::obs(&spec, AngularJ(a))));
    }
    v.extend(c_families(spec, |spec, a| Expr::obs(spec, AngularJ(a)), |spec, a| Expr::obs(spec, AngularJ(a)).square(), "J", ("J", "^2")));
    v.extend(involution_pairs(&spec).into_iter().take(3));
    v.push(ident("H = (K11 + K22 + K33 + kappa (J1^2 + J2^2 + J3^2))/2", move |s, _| {
        let tr: f64 = Axis::ALL.iter().map(|&a| spec.observable(Fradkin(a, a)).value(s)).sum::<Result<f64>>()?;
        let j = spec.observable(AngularSquared).value(s)?;
        let h = spec.hamiltonian(s)?;
        Ok(equality(0.5 * (tr + k * j), h, 0.5 * (tr.abs() + (k * j).abs()) + h.abs()))
    }));
    for a in Axis::ALL {
        // dM/dt = i λ α M
        v.push(ident(format!("{{M{0}re, H}} = -lambda alpha M{0}im", n(a)), move |s, _| {
            let lam = spec.observable(Lambda).value(s)?;
            let expected = -lam * alpha * spec.observable(MImag(a)).value(s)?;
            bracket_eval(&spec.observable(MReal(a)), &spec.hamiltonian_fn(), expected, s)
        }));
        v.push(ident(format!("{{M{0}im, H}} = lambda alpha M{0}re", n(a)), move |s, _| {
            let lam = spec.observable(Lambda).value(s)?;
            let expected = lam * alpha * spec.observable(MReal(a)).value(s)?;
            bracket_eval(&spec.observable(MImag(a)), &spec.hamiltonian_fn(), expected, s)
        }));
    }
    for a in Axis::ALL {
        let (i, j) = a.others();
        let m = move |s: &PhaseState, x: Axis| -> Result<(f64, f64)> {
            Ok((spec.observable(MReal(x)).value(s)?, spec.observable(MImag(x)).value(s)?))
        };
        v.push(ident(format!("Re(M{} M{}*) = K{}", n(i), n(j), Fradkin(i, j).name().trim_start_matches('K')), move |s, _| {
            let ((ar, ai), (br, bi)) = (m(s, i)?, m(s, j)?);
            let e = spec.observable(Fradkin(i, j)).value(s)?;
            Ok(equality(ar * br + ai * bi, e, (ar * br).abs() + (ai * bi).abs() + e.abs()))
        }));
        v.push(ident(format!("Im(M{} M{}*) = alpha J{}", n(i), n(j), n(a)), move |s, _| {
            let ((ar, ai), (br, bi)) = (m(s, i)?, m(s, j)?);
            let e = alpha * spec.observable(AngularJ(a)).value(s)?;
            Ok(equality(ai * br - ar * bi, e, (ai * br).abs() + (ar * bi).abs() + e.abs()))
        }));
        v.push(ident(format!("|M{0}|^2 = K{0}{0}", n(a)), move |s, _| {
            let (ar, ai) = m(s, a)?;
            let e = spec.observable(Fradkin(a, a)).value(s)?;
            Ok(equality(ar * ar + ai * ai, e, ar * ar + ai * ai + e.abs()))
        }));
    }
    v
}

/// `{c1 K_ii + c2 L_i, K_jj + K_kk + κ(M_j + M_k)} = 0`.
fn c_families(
    spec: SystemSpec,
    first: fn(&SystemSpec, Axis) -> Expr,
    second: fn(&SystemSpec, Axis) -> Expr,
    first_name: &'static str,
    (second_name, second_suffix): (&'static str, &'static str),
) -> Vec<Identity> {
    let k = spec.kappa.value();
    Axis::ALL
        .iter()
        .map(|&a| {
            let (b, c) = a.others();
            let name = format!(
                "{{c1 K{0}{0} + c2 {1}{0}, K{2}{2} + K{3}{3} + kappa ({4}{2}{5} + {4}{3}{5})}} = 0",
                n(a),
                first_name,
                n(b),
                n(c),
                second_name,
                second_suffix
            );
            ident_c(name, move |s, cs| {
                let f = Expr::sum(vec![(cs[0], Expr::obs(&spec, ObservableId::Fradkin(a, a))), (cs[1], first(&spec, a))]);
                let g = Expr::sum(vec![
                    (1.0, Expr::obs(&spec, ObservableId::Fradkin(b, b))),
                    (1.0, Expr::obs(&spec, ObservableId::Fradkin(c, c))),
                    (k, second(&spec, b)),
                    (k, second(&spec, c)),
                ]);
                bracket_eval(&f, &g, 0.0, s)
            })
        })
        .collect()
}

fn kj_pair_identities(spec: SystemSpec) -> Vec<Identity> {
    Axis::ALL
        .iter()
        .map(|&a| {
            let (b, c) = a.others();
            let pair = Expr::sum(vec![(1.0, Expr::obs(&spec, ObservableId::AngularKJ(b))), (1.0, Expr::obs(&spec, ObservableId::AngularKJ(c)))]);
            commute(Expr::obs(&spec, ObservableId::AngularKJ(a)), pair)
        })
        .collect()
}

fn sw_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let k = spec.kappa.value();
    let c = spec.couplings;
    let mut v = Vec::new();
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, AngularKJ(a))));
    }
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, Fradkin(a, a))));
    }
    v.extend(kj_pair_identities(spec));
    for a in Axis::ALL {
        v.push(commute(Expr::obs(&spec, Fradkin(a, a)), Expr::obs(&spec, AngularKJ(a))));
    }
    v.extend(c_families(spec, |spec, a| Expr::obs(spec, AngularKJ(a)), |spec, a| Expr::obs(spec, AngularKJ(a)), "KJ", ("KJ", "")));
    v.push(ident("H = (K11 + K22 + K33 + kappa (KJ1 + KJ2 + KJ3))/2 + kappa (k1 + k2 + k3)", move |s, _| {
        let mut rhs = k * (c.k1 + c.k2 + c.k3);
        let mut scale = rhs.abs();
        for a in Axis::ALL {
            let kk = spec.observable(Fradkin(a, a)).value(s)?;
            let kj = k * spec.observable(AngularKJ(a)).value(s)?;
            rhs += 0.5 * (kk + kj);
            scale += 0.5 * (kk.abs() + kj.abs());
        }
        let h = spec.hamiltonian(s)?;
        Ok(equality(h, rhs, scale + h.abs()))
    }));
    v
}

fn osc112_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let k = spec.kappa.value();
    let mut v: Vec<Identity> =
        spec.catalog().integrals.into_iter().map(|o| commutes_with_h(spec, Expr::Obs(o))).collect();
    v.extend(involution_pairs(&spec).into_iter().filter(|i| !i.name.contains("H,")));
    v.push(ident("H = (K3 + K12_112 + kappa KJ3)/2", move |s, _| {
        let k3 = spec.observable(K3).value(s)?;
        let k12 = spec.observable(K12Osc112).value(s)?;
        let kj3 = k * spec.observable(AngularKJ(Axis::Z)).value(s)?;
        let h = spec.hamiltonian(s)?;
        Ok(equality(h, 0.5 * (k3 + k12 + kj3), h.abs() + 0.5 * (k3.abs() + k12.abs() + kj3.abs())))
    }));
    v
}

fn kepler_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let k = spec.kappa.value();
    let mut v = Vec::new();
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, AngularJ(a))));
    }
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, RungeLenz(a))));
    }
    for a in Axis::ALL {
        let (b, c) = a.others();
        let name = format!("{{KRL{}, KRL{}}} = -2 J{} (H - kappa (J1^2 + J2^2 + J3^2))", n(b), n(c), n(a));
        v.push(ident(name, move |s, _| {
            let j = spec.observable(AngularJ(a)).value(s)?;
            let jsq = spec.observable(AngularSquared).value(s)?;
            let expected = -2.0 * j * (spec.hamiltonian(s)? - k * jsq);
            bracket_eval(&spec.observable(RungeLenz(b)), &spec.observable(RungeLenz(c)), expected, s)
        }));
    }
    v.extend(rotation_family(spec, "KRL", RungeLenz));
    v.extend(involution_pairs(&spec));
    v
}

fn kepler123_identities(spec: SystemSpec) -> Vec<Identity> {
    use ObservableId::*;
    let cpl = spec.couplings;
    let mut v = Vec::new();
    for a in Axis::ALL {
        v.push(commutes_with_h(spec, Expr::obs(&spec, AngularKJ(a))));
    }
    for a in Axis::ALL {
        if cpl.nonlinear(a) >= 0.0 {
            v.push(commutes_with_h(spec, Expr::obs(&spec, QuarticKR(a))));
        }
    }
    v.extend(kj_pair_identities(spec));
    for a in Axis::ALL {
        let ka = cpl.nonlinear(a);
        v.push(ident(format!("{{R{0}, H}} = -2 k{0} lambda{0} Q{0}", n(a)), move |s, _| {
            let lam = spec.observable(CoordLambda(a)).value(s)?;
            let expected = -2.0 * ka * lam * spec.observable(RadialRatio(a)).value(s)?;
            bracket_eval(&spec.observable(RungeLenzR(a)), &spec.hamiltonian_fn(), expected, s)
        }));
        v.push(ident(format!("{{Q{0}, H}} = lambda{0} R{0}", n(a)), move |s, _| {
            let lam = spec.observable(CoordLambda(a)).value(s)?;
            let expected = lam * spec.observable(RungeLenzR(a)).value(s)?;
            bracket_eval(&spec.observable(RadialRatio(a)), &spec.hamiltonian_fn(), expected, s)
        }));
    }
    for a in Axis::ALL {
        let ka = cpl.nonlinear(a);
        if ka < 0.0 {
            continue;
        }
        let w = (2.0 * ka).sqrt();
        // dN/dt = +i sqrt(2k) λ N
        v.push(ident(format!("{{N{0}re, H}} = -sqrt(2 k{0}) lambda{0} N{0}im", n(a)), move |s, _| {
            let lam = spec.observable(CoordLambda(a)).value(s)?;
            let expected = -w * lam * spec.observable(NImag(a)).value(s)?;
            bracket_eval(&spec.observable(NReal(a)), &spec.hamiltonian_fn(), expected, s)
        }));
        v.push(ident(format!("{{N{0}im, H}} = sqrt(2 k{0}) lambda{0} N{0}re", n(a)), move |s, _| {
            let lam = spec.observable(CoordLambda(a)).value(s)?;
            let expected = w * lam * spec.observable(NReal(a)).value(s)?;
            bracket_eval(&spec.observable(NImag(a)), &spec.hamiltonian_fn(), expected, s)
        }));
    }
    v
}

/// Every displayed identity for the system, in a fixed order.
pub fn identities(spec: &SystemSpec) -> Vec<Identity> {
    let spec = *spec;
    match spec.id {
        SystemId::FreeGeodesic => free_identities(spec),
        SystemId::Oscillator => oscillator_identities(spec),
        SystemId::SmorodinskyWinternitz => sw_identities(spec),
        SystemId::Oscillator112 => osc112_identities(spec),
        SystemId::Kepler => kepler_identities(spec),
        SystemId::Kepler123 => kepler123_identities(spec),
    }
}

/// Evaluates one identity at `samples` states drawn from its own stream
/// `(seed, system + identity name)`, with fresh constants `c ∈ [−1, 1]³`
/// per state. States where the identity cannot be evaluated are replaced.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn audit_identity(spec: &SystemSpec, identity: &Identity, samples: usize, seed: u64) -> Result<IdentityReport> {
    let mut g = rng(seed, stream_id(&format!("{}/{}", spec.id, identity.name)));
    let mut worst: Option<BracketResidual> = None;
    let mut max_abs: f64 = 0.0;
    let mut done = 0;
    let mut misses = 0;
    while done < samples {
        let s = sample_state(spec, &mut g)?;
        let c = [g.gen_range(-1.0..=1.0), g.gen_range(-1.0..=1.0), g.gen_range(-1.0..=1.0)];
        let ev = match identity.evaluate(&s, &c) {
            Ok(ev) => ev,
            Err(e) => {
                misses += 1;
                if misses > MAX_RESAMPLES {
                    return Err(e);
                }
                continue;
            }
        };
        done += 1;
        let res = BracketResidual {
            identity: identity.name.clone(),
            state: s,
            expected: ev.expected,
            computed: ev.computed,
            residual: ev.abs_residual(),
            scaled_residual: ev.residual(),
        };
        max_abs = max_abs.max(res.residual);
        // NaN compares false, so a NaN residual always becomes the worst
        let replace = match &worst {
            None => true,
            Some(w) => !(res.scaled_residual <= w.scaled_residual),
        };
        if replace && !worst.as_ref().is_some_and(|w| w.scaled_residual.is_nan()) {
            worst = Some(res);
        }
    }
    let worst = worst.expect("at least one sample");
    let max_scaled = worst.scaled_residual;
    Ok(IdentityReport {
        identity: identity.name.clone(),
        samples,
        max_scaled_residual: max_scaled,
        max_abs_residual: max_abs,
        passed: max_scaled < IDENTITY_TOL,
        worst,
    })
}

pub fn bracket_table_audit(spec: &SystemSpec, samples: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    identities(spec).iter().map(|id| audit_identity(spec, id, samples, seed)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResidual {
    pub property: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs|` over the sum of the absolute values of all terms.
    pub residual: f64,
}

fn relative(property: String, lhs: f64, rhs: f64, scale: f64) -> AuditResidual {
    let d = (lhs - rhs).abs();
    let residual = if d == 0.0 { 0.0 } else { d / scale };
    AuditResidual { property, lhs, rhs, residual }
}

/// The algebraic properties of the Fradkin matrix of the oscillator at `s`:
/// (i) trace, (ii) determinant, (iii) `K J = 0`, (iv) the quadratic forms in
/// `x_κ`, (v) the 2×2 minors, (vi) the three contractions.
pub fn fradkin_audit(kappa: Curvature, alpha: f64, s: &PhaseState) -> Result<Vec<AuditResidual>> {
    use ObservableId::*;
    let c = Couplings { alpha, ..Default::default() };
    let spec = SystemSpec::new(SystemId::Oscillator, kappa, c)?;
    let val = |id| Observable::new(id, kappa, c).value(s);
    let mut km = [[0.0; 3]; 3];
    for a in Axis::ALL {
        for b in Axis::ALL {
            km[a.index()][b.index()] = val(Fradkin(a, b))?;
        }
    }
    let mut j = [0.0; 3];
    let mut p = [0.0; 3];
    let mut x = [0.0; 3];
    for a in Axis::ALL {
        j[a.index()] = val(AngularJ(a))?;
        p[a.index()] = val(NoetherP(a))?;
        x[a.index()] = val(Coordinate(a))?;
    }
    let h = spec.hamiltonian(s)?;
    let k = kappa.value();
    let jsq: f64 = j.iter().map(|v| v * v).sum();
    let psq: f64 = p.iter().map(|v| v * v).sum();
    let sr = sin_k(kappa, s.q.r);
    let cr = cos_k(kappa, s.q.r);
    let mut out = Vec::new();

    let tr = km[0][0] + km[1][1] + km[2][2];
    out.push(relative(
        "(i) tr K + kappa J^2 = 2H".into(),
        tr + k * jsq,
        2.0 * h,
        km[0][0].abs() + km[1][1].abs() + km[2][2].abs() + (k * jsq).abs() + 2.0 * h.abs(),
    ));

    let perms: [([usize; 3], f64); 6] =
        [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)];
    let mut det = 0.0;
    let mut det_scale = 0.0;
    for (pm, sign) in perms {
        let t = km[0][pm[0]] * km[1][pm[1]] * km[2][pm[2]];
        det += sign * t;
        det_scale += t.abs();
    }
    out.push(relative("(ii) det K = 0".into(), det, 0.0, det_scale));

    for (i, row) in km.iter().enumerate() {
        let terms: Vec<f64> = (0..3).map(|b| row[b] * j[b]).collect();
        out.push(relative(
            format!("(iii) (K J)_{} = 0", i + 1),
            terms.iter().sum(),
            0.0,
            terms.iter().map(|t| t.abs()).sum(),
        ));
    }

    for a in Axis::ALL {
        let (b, c) = a.others();
        let (ib, ic, ia) = (b.index(), c.index(), a.index());
        let t = [x[ib] * x[ib] * km[ic][ic], -2.0 * x[ib] * x[ic] * km[ib][ic], x[ic] * x[ic] * km[ib][ib]];
        let rhs = cr * cr * j[ia] * j[ia];
        out.push(relative(
            format!("(iv) x{0}^2 K{1}{1} - 2 x{0} x{1} K{0}{1} + x{1}^2 K{0}{0} = Cos^2 J{2}^2", n(b), n(c), n(a)),
            t.iter().sum(),
            rhs,
            t.iter().map(|v| v.abs()).sum::<f64>() + rhs.abs(),
        ));
    }

    for a in Axis::ALL {
        let (b, c) = a.others();
        let (ib, ic, ia) = (b.index(), c.index(), a.index());
        let prod = km[ib][ib] * km[ic][ic];
        let sq = km[ib][ic] * km[ib][ic];
        let rhs = alpha * alpha * j[ia] * j[ia];
        out.push(relative(
            format!("(v) K{0}{0} K{1}{1} - K{0}{1}^2 = alpha^2 J{2}^2", n(b), n(c), n(a)),
            prod - sq,
            rhs,
            prod.abs() + sq + rhs,
        ));
    }

    let contract = |u: &[f64; 3], w: &[f64; 3]| -> (f64, f64) {
        let mut sum = 0.0;
        let mut scale = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let t = km[a][b] * u[a] * w[b];
                sum += t;
                scale += t.abs();
            }
        }
        (sum, scale)
    };
    let (kxx, sxx) = contract(&x, &x);
    let rhs = 2.0 * sr * sr * h - jsq;
    out.push(relative("(vi) K x x = 2 Sin^2 H - J^2".into(), kxx, rhs, sxx + 2.0 * (sr * sr * h).abs() + jsq));
    let (kxp, sxp) = contract(&x, &p);
    let rhs = s.p_r * sr * (2.0 * h - k * jsq);
    let rhs_scale = (s.p_r * sr).abs() * (2.0 * h.abs() + (k * jsq).abs());
    out.push(relative("(vi) K x P = p_r Sin (2H - kappa J^2)".into(), kxp, rhs, sxp + rhs_scale));
    let (kpp, spp) = contract(&p, &p);
    let t2 = (sr / cr).powi(2);
    let rhs = psq * psq + alpha * alpha * t2 * s.p_r * s.p_r;
    out.push(relative("(vi) K P P = (P^2)^2 + alpha^2 Tan^2 p_r^2".into(), kpp, rhs, spp + rhs));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_states;

    #[test]
    fn fradkin_properties_hold() {
        for kappa in [-1.0, 0.0, 0.7] {
            let spec = SystemSpec::oscillator(kappa, 1.3).unwrap();
            for s in sample_states(&spec, 10, &mut rng(2, 0)).unwrap() {
                let rows = fradkin_audit(spec.kappa, 1.3, &s).unwrap();
                assert_eq!(rows.len(), 14);
                for r in rows {
                    assert!(r.residual < 1e-10, "{} {:e}", r.property, r.residual);
                }
            }
        }
    }

    #[test]
    fn kernel_of_fradkin_at_rest() {
        let s = PhaseState::new(0.8, 1.0, 0.5, 0.0, 0.0, 0.0);
        let rows = fradkin_audit(Curvature::new(0.5).unwrap(), 1.0, &s).unwrap();
        for r in rows.iter().filter(|r| r.property.starts_with("(iii)")) {
            assert_eq!(r.lhs, 0.0);
            assert_eq!(r.residual, 0.0);
        }
    }

    #[test]
    fn free_table_shape() {
        let spec = SystemSpec::free(0.7).unwrap();
        let ids = identities(&spec);
        assert_eq!(ids.iter().filter(|i| i.name.ends_with(", H} = 0")).count(), 6);
        assert_eq!(ids.iter().filter(|i| i.name.contains("} = kappa J")).count(), 3);
        assert_eq!(ids.iter().filter(|i| i.parametrized).count(), 3);
        let rep = bracket_table_audit(&spec, 5, 1).unwrap();
        assert!(rep.iter().all(|r| r.passed), "{rep:#?}");
    }
}
