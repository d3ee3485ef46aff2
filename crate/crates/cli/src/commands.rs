use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use curvedyn_core::dynamics::audit::{fradkin_audit, identities, audit_identity, IdentityReport, IDENTITY_TOL};
use curvedyn_core::dynamics::conservation::ConservationRow;
use curvedyn_core::dynamics::orbit::closed_orbit_check_with;
use curvedyn_core::dynamics::rank::RANK_THRESHOLD;
use curvedyn_core::dynamics::{conservation_report, independence_rank, integrate, OrbitReport, Settings};
use curvedyn_core::sampling::{bounded_energy, rng, sample_bounded_state, sample_states, stream_id};
use curvedyn_core::{ObservableId, PhaseFunction, PhaseState, SystemId, SystemSpec};

use crate::config::{Metadata, RunConfig, SCHEMA_VERSION};

/// Share of sampled states at which a designated set must reach full rank.
pub const RANK_PASS_FRACTION: f64 = 0.95;

/// Fixed-width decimal with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Written in place of a value where the formula is singular.
pub const SENTINEL: &str = "NaN";

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_out_dir(c: &RunConfig) -> anyhow::Result<()> {
    fs::create_dir_all(&c.out_dir).with_context(|| format!("creating {}", c.out_dir.display()))
}

fn settings(c: &RunConfig) -> Settings {
    let it = &c.integrator;
    let mut s = match it.method {
        curvedyn_core::dynamics::Method::Rk45Adaptive => Settings::adaptive(it.tol),
        m => Settings::fixed(m, it.dt),
    };
    s.tol = it.tol;
    s
}

/// The configured state, or one drawn from the seed: below the escape
/// energy when the system has one, otherwise any admissible state.
fn start_states(c: &RunConfig, spec: &SystemSpec, label: &str, n: usize) -> anyhow::Result<Vec<PhaseState>> {
    if let Some(s) = c.initial_state() {
        return Ok(vec![s]);
    }
    let mut g = rng(c.seed(), stream_id(&format!("{label}/{}", spec.id)));
    let states = if bounded_energy(spec).is_some() {
        (0..n).map(|_| sample_bounded_state(spec, &mut g)).collect::<Result<Vec<_>, _>>()?
    } else {
        sample_states(spec, n, &mut g)?
    };
    Ok(states)
}

fn pool(c: &RunConfig) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = c.workers {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

#[derive(Serialize)]
struct ConservationJson<'a> {
    schema_version: u32,
    metadata: Metadata,
    system: &'a str,
    params: &'a std::collections::BTreeMap<String, f64>,
    initial_state: PhaseState,
    samples: usize,
    t_final: f64,
    truncated: Option<&'a str>,
    energy: &'a ConservationRow,
    observables: &'a [ConservationRow],
}

pub fn trajectory(c: &RunConfig) -> anyhow::Result<Outcome> {
    let spec = c.spec()?;
    let s0 = start_states(c, &spec, "trajectory", 1)?[0];
    let traj = integrate(&spec, &s0, c.integrator.t_end, &settings(c))?;

    create_out_dir(c)?;
    let csv_path = c.out_dir.join("trajectory.csv");
    let mut w = std::io::BufWriter::new(fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?);
    writeln!(w, "t,r,theta,phi,p_r,p_theta,p_phi")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let cols: Vec<String> = std::iter::once(*t).chain(s.as_array()).map(num).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    w.flush()?;

    let h = spec.hamiltonian_fn();
    let integrals = spec.catalog().integrals;
    let mut fns: Vec<&dyn PhaseFunction> = vec![&h];
    fns.extend(integrals.iter().map(|o| o as &dyn PhaseFunction));
    let report = conservation_report(&traj, &fns);
    let json_path = c.out_dir.join("conservation.json");
    write_json(
        &json_path,
        &ConservationJson {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata::new(c),
            system: spec.id.name(),
            params: &c.params,
            initial_state: s0,
            samples: report.samples,
            t_final: traj.last().0,
            truncated: traj.truncated.as_deref(),
            energy: &report.rows[0],
            observables: &report.rows[1..],
        },
    )?;
    if let Some(reason) = &traj.truncated {
        eprintln!("warning: run truncated: {reason}");
    }
    Ok(Outcome { passed: traj.truncated.is_none(), files: vec![csv_path, json_path] })
}

#[derive(Serialize)]
struct PropertyMax {
    property: String,
    max_residual: f64,
}

#[derive(Serialize)]
struct FradkinJson {
    states: usize,
    threshold: f64,
    max_residual: f64,
    properties: Vec<PropertyMax>,
    passed: bool,
}

#[derive(Serialize)]
struct RankJson {
    set: String,
    members: Vec<String>,
    expected_rank: usize,
    threshold: f64,
    ranks: Vec<usize>,
    full_rank_fraction: f64,
    passed: bool,
}

#[derive(Serialize)]
struct AuditJson<'a> {
    schema_version: u32,
    metadata: Metadata,
    system: &'a str,
    params: &'a std::collections::BTreeMap<String, f64>,
    samples: usize,
    identity_threshold: f64,
    identities: Vec<IdentityReport>,
    /// Identities relating a bracket with H to the coordinate factors `lambda_i`.
    lambda_pairings: usize,
    fradkin: Option<FradkinJson>,
    independence: Vec<RankJson>,
    passed: bool,
}

fn is_lambda_pairing(name: &str) -> bool {
    (name.starts_with("{R") || name.starts_with("{Q")) && name.contains("lambda")
}

fn fradkin_section(c: &RunConfig, spec: &SystemSpec) -> anyhow::Result<FradkinJson> {
    let states = sample_states(spec, c.samples, &mut rng(c.seed(), stream_id(&format!("fradkin/{}", spec.id))))?;
    let rows = states
        .par_iter()
        .map(|s| fradkin_audit(spec.kappa, spec.couplings.alpha, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut properties: Vec<PropertyMax> = Vec::new();
    for r in rows.iter().flatten() {
        match properties.iter_mut().find(|p| p.property == r.property) {
            Some(p) => p.max_residual = p.max_residual.max(r.residual),
            None => properties.push(PropertyMax { property: r.property.clone(), max_residual: r.residual }),
        }
    }
    let max_residual = properties.iter().map(|p| p.max_residual).fold(0.0, f64::max);
    Ok(FradkinJson { states: states.len(), threshold: IDENTITY_TOL, max_residual, properties, passed: max_residual < IDENTITY_TOL })
}

fn independence_section(c: &RunConfig, spec: &SystemSpec) -> anyhow::Result<Vec<RankJson>> {
    let mut out = Vec::new();
    for set in spec.catalog().independence_sets {
        let mut g = rng(c.seed(), stream_id(&format!("independence/{}/{}", spec.id, set.name)));
        let states = sample_states(spec, c.samples, &mut g)?;
        let ranks = states
            .par_iter()
            .map(|s| {
                let fns: Vec<&dyn PhaseFunction> = set.members.iter().map(|o| o as &dyn PhaseFunction).collect();
                independence_rank(&fns, s, RANK_THRESHOLD).map(|r| r.rank)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let expected = set.members.len();
        let full = ranks.iter().filter(|&&r| r == expected).count() as f64 / ranks.len() as f64;
        out.push(RankJson {
            set: set.name.clone(),
            members: set.members.iter().map(|o| o.name()).collect(),
            expected_rank: expected,
            threshold: RANK_THRESHOLD,
            ranks,
            full_rank_fraction: full,
            passed: full >= RANK_PASS_FRACTION,
        });
    }
    Ok(out)
}

pub fn audit(c: &RunConfig) -> anyhow::Result<Outcome> {
    let spec = c.spec()?;
    let (reports, fradkin, independence) = pool(c)?.install(|| -> anyhow::Result<_> {
        let ids = identities(&spec);
        let mut reports = ids
            .par_iter()
            .map(|id| audit_identity(&spec, id, c.samples, c.seed()))
            .collect::<Result<Vec<_>, _>>()?;
        for r in &mut reports {
            r.passed = r.max_scaled_residual < c.identity_tol;
        }
        let fradkin = match spec.id {
            SystemId::Oscillator => Some(fradkin_section(c, &spec)?),
            _ => None,
        };
        Ok((reports, fradkin, independence_section(c, &spec)?))
    })?;

    let passed = reports.iter().all(|r| r.passed)
        && fradkin.as_ref().is_none_or(|f| f.passed)
        && independence.iter().all(|r| r.passed);
    let lambda_pairings = reports.iter().filter(|r| is_lambda_pairing(&r.identity)).count();
    for r in reports.iter().filter(|r| !r.passed) {
        eprintln!("FAIL {}: scaled residual {:e}", r.identity, r.max_scaled_residual);
    }
    for r in independence.iter().filter(|r| !r.passed) {
        eprintln!("FAIL rank of {}: full at {:.0}% of states", r.set, 100.0 * r.full_rank_fraction);
    }
    if let Some(f) = fradkin.as_ref().filter(|f| !f.passed) {
        eprintln!("FAIL Fradkin properties: residual {:e}", f.max_residual);
    }
    println!(
        "{} identities, {} lambda pairings, {} independence sets: {}",
        reports.len(),
        lambda_pairings,
        independence.len(),
        if passed { "pass" } else { "FAIL" }
    );

    create_out_dir(c)?;
    let path = c.out_dir.join("audit.json");
    write_json(
        &path,
        &AuditJson {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata::new(c),
            system: spec.id.name(),
            params: &c.params,
            samples: c.samples,
            identity_threshold: c.identity_tol,
            identities: reports,
            lambda_pairings,
            fradkin,
            independence,
            passed,
        },
    )?;
    Ok(Outcome { passed, files: vec![path] })
}

#[derive(Serialize)]
struct ProfileEntry {
    kappa: f64,
    file: String,
    singular_rows: usize,
    /// `V` far out along the ray, for `kappa < 0`.
    far_field: Option<FarField>,
}

#[derive(Serialize)]
struct FarField {
    r: f64,
    v: f64,
}

#[derive(Serialize)]
struct PotentialJson<'a> {
    schema_version: u32,
    metadata: Metadata,
    system: &'a str,
    r_min: f64,
    r_max: f64,
    points: usize,
    profiles: Vec<ProfileEntry>,
}

/// Radius where `tanh(sqrt(-kappa) r)` equals 1 in double precision.
fn far_radius(kappa: f64) -> f64 {
    40.0 / (-kappa).sqrt()
}

pub fn potential(c: &RunConfig) -> anyhow::Result<Outcome> {
    create_out_dir(c)?;
    let mut files = Vec::new();
    let mut profiles = Vec::new();
    for &kappa in &c.kappas {
        let spec = c.spec_at(kappa)?;
        let rows = spec.potential_profile(c.r_min, c.r_max, c.points)?;
        let name = format!("potential_{}_kappa{kappa}.csv", spec.id);
        let path = c.out_dir.join(&name);
        let mut text = String::from("r,V\n");
        for row in &rows {
            let v = row.v.map_or_else(|| SENTINEL.to_string(), num);
            text.push_str(&format!("{},{v}\n", num(row.r)));
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        let far_field = if kappa < 0.0 {
            let r = far_radius(kappa);
            spec.potential_profile(r, r, 1)?[0].v.map(|v| FarField { r, v })
        } else {
            None
        };
        profiles.push(ProfileEntry { kappa, file: name, singular_rows: rows.iter().filter(|r| r.v.is_none()).count(), far_field });
        files.push(path);
    }
    let path = c.out_dir.join("potential.json");
    write_json(
        &path,
        &PotentialJson {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata::new(c),
            system: &c.system,
            r_min: c.r_min,
            r_max: c.r_max,
            points: c.points,
            profiles,
        },
    )?;
    files.push(path);
    Ok(Outcome { passed: true, files })
}

#[derive(Serialize)]
struct OrbitEntry {
    initial_state: PhaseState,
    report: Option<OrbitReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct OrbitJson<'a> {
    schema_version: u32,
    metadata: Metadata,
    system: &'a str,
    params: &'a std::collections::BTreeMap<String, f64>,
    t_max: f64,
    delta: f64,
    orbits: Vec<OrbitEntry>,
    passed: bool,
}

pub fn closed_orbit(c: &RunConfig) -> anyhow::Result<Outcome> {
    let spec = c.spec()?;
    let starts = start_states(c, &spec, "closed-orbit", c.orbits)?;
    let orbits: Vec<OrbitEntry> = pool(c)?.install(|| {
        starts
            .par_iter()
            .map(|&s| match closed_orbit_check_with(&spec, &s, c.t_max, c.delta) {
                Ok(r) => OrbitEntry { initial_state: s, report: Some(r), error: None },
                Err(e) => OrbitEntry { initial_state: s, report: None, error: Some(e.to_string()) },
            })
            .collect()
    });
    let passed = orbits.iter().all(|o| o.report.is_some_and(|r| r.is_closed));
    for o in &orbits {
        match (&o.report, &o.error) {
            (Some(r), _) => println!(
                "{}: distance {:e} at t = {}",
                if r.is_closed { "closed" } else { "open" },
                r.return_distance,
                r.period_estimate
            ),
            (None, Some(e)) => println!("error: {e}"),
            (None, None) => unreachable!(),
        }
    }
    create_out_dir(c)?;
    let path = c.out_dir.join("closed_orbit.json");
    write_json(
        &path,
        &OrbitJson {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata::new(c),
            system: spec.id.name(),
            params: &c.params,
            t_max: c.t_max,
            delta: c.delta,
            orbits,
            passed,
        },
    )?;
    Ok(Outcome { passed, files: vec![path] })
}

pub fn list_systems() -> String {
    let mut out = String::new();
    for id in SystemId::ALL {
        let params = std::iter::once("kappa").chain(id.parameters().iter().copied()).collect::<Vec<_>>().join(",");
        out.push_str(&format!("{:<11} {:<20} {}\n", id.name(), params, id.description()));
    }
    out
}

/// Every observable name with its momentum degree, or the integrals cataloged
/// for one system.
pub fn list_observables(system: Option<&str>) -> anyhow::Result<String> {
    let mut out = String::new();
    match system {
        None => {
            for id in ObservableId::all() {
                out.push_str(&format!("{:<8} degree {}\n", id.name(), id.momentum_degree()));
            }
        }
        Some(name) => {
            let args = crate::config::RunArgs { system: Some(name.into()), ..Default::default() };
            let spec = args.resolve(None)?.spec()?;
            let cat = spec.catalog();
            out.push_str("integrals:");
            for n in cat.integral_names() {
                out.push_str(&format!(" {n}"));
            }
            out.push('\n');
            for s in &cat.involution_sets {
                let names: Vec<String> = s.members.iter().map(|e| e.name()).collect();
                out.push_str(&format!("involution {}: {}\n", s.name, names.join("; ")));
            }
            for s in &cat.independence_sets {
                let names: Vec<String> = s.members.iter().map(|o| o.name()).collect();
                out.push_str(&format!("independence {}: {}\n", s.name, names.join(", ")));
            }
        }
    }
    Ok(out)
}
