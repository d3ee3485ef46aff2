mod common;

use common::{kap, sin_k, spec, KAPPAS};
use curvedyn_core::dynamics::integrate::{integrate_ode, OdeSystem, State};
use curvedyn_core::dynamics::{conservation_report, Settings, Trajectory};
use curvedyn_core::geometry::{
    from_chart, geodesic_forces, geodesic_lagrangian, killing_field, legendre, legendre_inv, lie_bracket_numeric,
    metric_coeffs, metric_lie_derivative, to_r_chart, to_rho_chart, volume_divergence, ConfigPoint, KillingField, TangentVector,
    VelocityState, FIELD_FD_STEP,
};
use curvedyn_core::observables::Axis;
use curvedyn_core::sampling::{rng, sample_states, stream_id};
use curvedyn_core::{Curvature, ObservableId, PhaseFunction, PhaseState, Result, SystemId};

const CURVED: [f64; 4] = [-1.0, -0.3, 0.7, 1.0];

fn points(kappa: f64, n: usize, label: &str) -> Vec<ConfigPoint> {
    let sp = spec(SystemId::FreeGeodesic, kappa);
    let mut g = rng(11, stream_id(&format!("{label}/{kappa}")));
    sample_states(&sp, n, &mut g).unwrap().into_iter().map(|s| s.q).collect()
}

/// Size of the three terms of `(L_V g)_ij`: `|V^k ∂_k g_ij| + |g_jj ∂_i V^j| + |g_ii ∂_j V^i|`.
fn lie_derivative_term_sizes(id: KillingField, kappa: Curvature, q: &ConfigPoint, h: f64) -> [[f64; 3]; 3] {
    let shift = |k: usize, d: f64| {
        let mut a = q.as_array();
        a[k] += d;
        ConfigPoint::from_array(a)
    };
    let g = |p: &ConfigPoint| {
        let (a, b, c) = metric_coeffs(kappa, p);
        [a, b, c]
    };
    let v = killing_field(id, kappa, q).unwrap().as_array();
    let mut dv = [[0.0; 3]; 3];
    let mut dg = [[0.0; 3]; 3];
    for k in 0..3 {
        let (vp, vm) = (killing_field(id, kappa, &shift(k, h)).unwrap(), killing_field(id, kappa, &shift(k, -h)).unwrap());
        let (gp, gm) = (g(&shift(k, h)), g(&shift(k, -h)));
        for i in 0..3 {
            dv[k][i] = (vp.as_array()[i] - vm.as_array()[i]) / (2.0 * h);
            dg[k][i] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let g0 = g(q);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let transport: f64 = if i == j { (0..3).map(|k| (v[k] * dg[k][i]).abs()).sum() } else { 0.0 };
            out[i][j] = transport + (g0[j] * dv[i][j]).abs() + (g0[i] * dv[j][i]).abs();
        }
    }
    out
}

// Absolute 1e-8 holds away from the poles; within ~0.1 of θ ∈ {0, π} the
// O(h²) stencil error of the 1/sinθ factors reaches a few 1e-8, so each
// component is measured against the size of its terms.
#[test]
fn killing_fields_preserve_the_metric() {
    let mut worst_abs: f64 = 0.0;
    for kappa in CURVED {
        for q in points(kappa, 50, "killing") {
            for id in KillingField::ALL {
                let l = metric_lie_derivative(id, kap(kappa), &q, 1e-5).unwrap();
                let sizes = lie_derivative_term_sizes(id, kap(kappa), &q, 1e-5);
                for i in 0..3 {
                    for j in 0..3 {
                        worst_abs = worst_abs.max(l[i][j].abs());
                        let rel = l[i][j].abs() / sizes[i][j].max(1.0);
                        assert!(rel < 1e-8, "{} κ={kappa} {q:?} ({i},{j}): {:e}", id.name(), l[i][j]);
                        if q.theta.sin() > 0.2 {
                            assert!(l[i][j].abs() < 1e-8, "{} κ={kappa} {q:?}: {:e}", id.name(), l[i][j]);
                        }
                    }
                }
            }
        }
    }
    assert!(worst_abs < 1e-6);
}

#[test]
fn killing_fields_preserve_the_volume() {
    for kappa in CURVED {
        for q in points(kappa, 50, "volume") {
            for id in KillingField::ALL {
                let d = volume_divergence(id, kap(kappa), &q, FIELD_FD_STEP).unwrap();
                assert!(d.abs() < 1e-8, "{} κ={kappa}: {d:e}", id.name());
            }
        }
    }
}

/// Expected commutator as a combination of fields.
fn expected_bracket(a: KillingField, b: KillingField, kappa: Curvature, q: &ConfigPoint) -> TangentVector {
    use KillingField::*;
    let field = |f| killing_field(f, kappa, q).unwrap();
    let k = kappa.value();
    let x = [X1, X2, X3];
    let y = [Y1, Y2, Y3];
    let idx = |f: KillingField| match f {
        X1 | Y1 => 0,
        X2 | Y2 => 1,
        X3 | Y3 => 2,
    };
    let is_x = |f: KillingField| matches!(f, X1 | X2 | X3);
    let (i, j) = (idx(a), idx(b));
    if i == j {
        return TangentVector::default();
    }
    // ε_ijk with the third index
    let third = 3 - i - j;
    let eps = if (i + 1) % 3 == j { 1.0 } else { -1.0 };
    match (is_x(a), is_x(b)) {
        (true, true) => field(y[third]).scaled(-k * eps),
        (false, false) => field(y[third]).scaled(-eps),
        // {J_i, P_j} = ε_ijk P_k and the bracket map reverses signs
        (false, true) => field(x[third]).scaled(-eps),
        (true, false) => field(x[third]).scaled(-eps),
    }
}

#[test]
fn lie_algebra_table() {
    let all = KillingField::ALL;
    let mut pairs = Vec::new();
    for (n, &a) in all.iter().enumerate() {
        for &b in &all[n + 1..] {
            pairs.push((a, b));
        }
    }
    assert_eq!(pairs.len(), 15);
    for kappa in CURVED.iter().copied().chain([0.0]) {
        for q in points(kappa, 20, "lie") {
            for &(a, b) in &pairs {
                let got = lie_bracket_numeric(a, b, kap(kappa), &q, FIELD_FD_STEP).unwrap();
                let want = expected_bracket(a, b, kap(kappa), &q);
                let d = got.max_abs_diff(&want);
                assert!(d < 1e-6, "[{}, {}] κ={kappa}: {d:e}", a.name(), b.name());
            }
        }
    }
}

#[test]
fn bracket_table_spot_values() {
    use KillingField::*;
    let q = ConfigPoint::new(0.9, 1.1, 0.7);
    let k = kap(0.5);
    let y1 = killing_field(Y1, k, &q).unwrap();
    let x3 = killing_field(X3, k, &q).unwrap();
    assert!(lie_bracket_numeric(X1, X2, k, &q, 1e-5).unwrap().max_abs_diff(&killing_field(Y3, k, &q).unwrap().scaled(-0.5)) < 1e-8);
    assert!(lie_bracket_numeric(Y2, Y3, k, &q, 1e-5).unwrap().max_abs_diff(&y1.scaled(-1.0)) < 1e-8);
    assert!(lie_bracket_numeric(Y1, X2, k, &q, 1e-5).unwrap().max_abs_diff(&x3.scaled(-1.0)) < 1e-8);
}

struct Geodesic(Curvature);

impl OdeSystem for Geodesic {
    fn rhs(&self, y: &State) -> Result<State> {
        let (fr, ft, fp) = geodesic_forces(self.0, &VelocityState::from_array(*y))?;
        Ok([y[3], y[4], y[5], fr, ft, fp])
    }
}

struct KineticEnergy(Curvature);

impl PhaseFunction for KineticEnergy {
    fn label(&self) -> String {
        "T".into()
    }

    fn jet(&self, s: &PhaseState) -> Result<curvedyn_core::jet::Jet> {
        let v = legendre_inv(self.0, s)?;
        Ok(geodesic_lagrangian(self.0, &v).into())
    }
}

/// Largest relative drift of `T` and the six momenta along the velocity-form
/// geodesic flow, with the largest `Sin_κ(r)²` reached.
fn geodesic_drift(kappa: f64, label: &str) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let k = kap(kappa);
    let sp = spec(SystemId::FreeGeodesic, kappa);
    let mut g = rng(5, stream_id(&format!("{label}/{kappa}")));
    for s0 in sample_states(&sp, 3, &mut g).unwrap() {
        let v0 = legendre_inv(k, &s0).unwrap();
        let sol = integrate_ode(&Geodesic(k), v0.as_array(), 10.0, &Settings::adaptive(1e-12)).unwrap();
        assert!(sol.truncated.is_none(), "κ={kappa}: {:?}", sol.truncated);
        let states: Vec<PhaseState> =
            sol.states.iter().map(|y| legendre(k, &VelocityState::from_array(*y))).collect();
        let traj = Trajectory { times: sol.times, states, diagnostics: sol.diagnostics, truncated: None };
        let mut obs = Vec::new();
        for a in Axis::ALL {
            obs.push(sp.observable(ObservableId::NoetherP(a)));
            obs.push(sp.observable(ObservableId::AngularJ(a)));
        }
        let t = KineticEnergy(k);
        let mut fns: Vec<&dyn PhaseFunction> = vec![&t];
        fns.extend(obs.iter().map(|o| o as &dyn PhaseFunction));
        let rows = conservation_report(&traj, &fns).rows;
        assert!(rows.iter().all(|r| r.failures == 0));
        let drift = rows.iter().map(|r| r.max_rel_drift).fold(0.0, f64::max);
        let s2 = traj.states.iter().map(|s| sin_k(kappa, s.q.r).powi(2)).fold(0.0, f64::max);
        out.push((drift, s2));
    }
    out
}

#[test]
fn geodesic_flow_conserves_energy_and_noether_momenta() {
    for kappa in [0.0, 0.7, 1.0] {
        for (drift, _) in geodesic_drift(kappa, "geodesic") {
            assert!(drift < 1e-9, "κ={kappa}: {drift:e}");
        }
    }
}

// On H3 every geodesic escapes and v_θ, v_φ decay like Sin⁻²(r); the absolute
// part of the step tolerance then dominates, and mapping back to momenta
// multiplies that error by Sin².
#[test]
fn hyperbolic_geodesic_drift_is_set_by_the_absolute_tolerance() {
    for kappa in [-1.0, -0.3] {
        for (drift, s2) in geodesic_drift(kappa, "geodesic") {
            assert!(drift < 1e-9 * s2.max(1.0), "κ={kappa}: {drift:e} with Sin² up to {s2:e}");
        }
    }
}

#[test]
fn charts_round_trip_at_sampled_states() {
    for kappa in KAPPAS {
        let sp = spec(SystemId::Oscillator, kappa);
        let mut g = rng(9, stream_id(&format!("charts/{kappa}")));
        for s in sample_states(&sp, 50, &mut g).unwrap() {
            for cs in [to_rho_chart(sp.kappa, &s).unwrap(), to_r_chart(sp.kappa, &s).unwrap()] {
                let back = from_chart(sp.kappa, &cs).unwrap();
                let d = back.as_array().iter().zip(s.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(d < 1e-12, "{cs:?}: {d:e}");
            }
        }
    }
}
