//! Straight-line transcriptions of the printed formulas, written without
//! the library's jets or helpers, plus shared fixtures.
#![allow(dead_code)]

use curvedyn_core::geometry::PhaseState;
use curvedyn_core::observables::Couplings;
use curvedyn_core::{Curvature, SystemId, SystemSpec};

pub const KAPPAS: [f64; 5] = [-1.0, -0.3, 0.0, 0.7, 1.0];

pub fn kap(k: f64) -> Curvature {
    Curvature::new(k).unwrap()
}

/// Default parameter set for each system.
pub fn spec(id: SystemId, kappa: f64) -> SystemSpec {
    match id {
        SystemId::FreeGeodesic => SystemSpec::free(kappa),
        SystemId::Oscillator => SystemSpec::oscillator(kappa, 1.0),
        SystemId::SmorodinskyWinternitz => SystemSpec::sw(kappa, 1.0, 0.1, 0.2, 0.3),
        SystemId::Oscillator112 => SystemSpec::osc112(kappa, 1.0, 0.1, 0.2),
        SystemId::Kepler => SystemSpec::kepler(kappa, -1.0),
        SystemId::Kepler123 => SystemSpec::kepler123(kappa, -1.0, 0.1, 0.2, 0.3),
    }
    .unwrap()
}

pub fn sin_k(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * r).sin() / k.sqrt()
    } else if k < 0.0 {
        ((-k).sqrt() * r).sinh() / (-k).sqrt()
    } else {
        r
    }
}

pub fn cos_k(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * r).cos()
    } else if k < 0.0 {
        ((-k).sqrt() * r).cosh()
    } else {
        1.0
    }
}

pub struct Oracle {
    pub k: f64,
    pub c: Couplings,
}

struct Pt {
    pr: f64,
    pt: f64,
    pp: f64,
    st: f64,
    ct: f64,
    sp: f64,
    cp: f64,
    sr: f64,
    cr: f64,
}

impl Oracle {
    fn pt(&self, s: &PhaseState) -> Pt {
        Pt {
            pr: s.p_r,
            pt: s.p_theta,
            pp: s.p_phi,
            st: s.q.theta.sin(),
            ct: s.q.theta.cos(),
            sp: s.q.phi.sin(),
            cp: s.q.phi.cos(),
            sr: sin_k(self.k, s.q.r),
            cr: cos_k(self.k, s.q.r),
        }
    }

    pub fn p(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        let q = v.cr / v.sr;
        [
            v.st * v.cp * v.pr + q * (v.ct * v.cp * v.pt - (v.sp / v.st) * v.pp),
            v.st * v.sp * v.pr + q * (v.ct * v.sp * v.pt + (v.cp / v.st) * v.pp),
            v.ct * v.pr - q * v.st * v.pt,
        ]
    }

    pub fn j(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        let cot = v.ct / v.st;
        [-(v.sp * v.pt + cot * v.cp * v.pp), v.cp * v.pt - cot * v.sp * v.pp, v.pp]
    }

    pub fn xyz(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        [v.sr * v.st * v.cp, v.sr * v.st * v.sp, v.sr * v.ct]
    }

    fn dir(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        [v.st * v.cp, v.st * v.sp, v.ct]
    }

    fn tan(&self, s: &PhaseState) -> f64 {
        let v = self.pt(s);
        v.sr / v.cr
    }

    fn kk(&self) -> [f64; 3] {
        [self.c.k1, self.c.k2, self.c.k3]
    }

    fn az(&self, s: &PhaseState) -> f64 {
        let w = self.tan(s) * s.q.theta.cos();
        w / (1.0 - self.k * w * w)
    }

    fn kj(&self, s: &PhaseState) -> [f64; 3] {
        let j = self.j(s);
        let [x, y, z] = self.xyz(s);
        let [k1, k2, k3] = self.kk();
        [
            j[0] * j[0] + 2.0 * (k2 * z * z / (y * y) + k3 * y * y / (z * z)),
            j[1] * j[1] + 2.0 * (k1 * z * z / (x * x) + k3 * x * x / (z * z)),
            j[2] * j[2] + 2.0 * (k1 * y * y / (x * x) + k2 * x * x / (y * y)),
        ]
    }

    fn krl(&self, s: &PhaseState) -> [f64; 3] {
        let p = self.p(s);
        let j = self.j(s);
        let u = self.dir(s);
        let k = self.c.k;
        [
            (p[1] * j[2] - p[2] * j[1]) + k * u[0],
            (p[2] * j[0] - p[0] * j[2]) + k * u[1],
            (p[0] * j[1] - p[1] * j[0]) + k * u[2],
        ]
    }

    fn r123(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        let [x, y, z] = self.xyz(s);
        let [k1, k2, k3] = self.kk();
        let sum = k1 / (x * x) + k2 / (y * y) + k3 / (z * z);
        let krl = self.krl(s);
        let u = self.dir(s);
        [0, 1, 2].map(|i| krl[i] + 2.0 * (v.cr * v.sr) * u[i] * sum)
    }

    fn q123(&self, s: &PhaseState) -> [f64; 3] {
        let v = self.pt(s);
        let xyz = self.xyz(s);
        [0, 1, 2].map(|i| v.pr * v.sr / xyz[i])
    }

    fn fradkin(&self, s: &PhaseState, a: usize, b: usize) -> f64 {
        let p = self.p(s);
        let t = self.tan(s);
        let u = self.dir(s);
        let al2 = self.c.alpha * self.c.alpha;
        if a == b {
            let ki = self.kk()[a];
            let extra = if ki != 0.0 { 2.0 * ki / (t * u[a]).powi(2) } else { 0.0 };
            p[a] * p[a] + al2 * t * t * u[a] * u[a] + extra
        } else {
            p[a] * p[b] + al2 * t * t * u[a] * u[b]
        }
    }

    fn k12_112(&self, s: &PhaseState) -> f64 {
        let k = self.k;
        let p = self.p(s);
        let j = self.j(s);
        let [x, y, _] = self.xyz(s);
        let rho2 = x * x + y * y;
        let az = self.az(s);
        let mut out = (p[0] * p[0] + k * j[0] * j[0])
            + (p[1] * p[1] + k * j[1] * j[1])
            + self.c.alpha * self.c.alpha * (1.0 + 4.0 * k * az * az) * (rho2 / (1.0 - k * rho2));
        if self.c.k2 != 0.0 {
            out += 2.0 * self.c.k2 * (1.0 - k * x * x) / (y * y);
        }
        if self.c.k1 != 0.0 {
            out += 2.0 * self.c.k1 * (1.0 - k * y * y) / (x * x);
        }
        out
    }

    fn krl_112(&self, s: &PhaseState, i: usize) -> f64 {
        let v = self.pt(s);
        let p = self.p(s);
        let j = self.j(s);
        let [x, y, z] = self.xyz(s);
        let tt = v.st / v.ct;
        let az2 = self.az(s).powi(2);
        let al2 = self.c.alpha * self.c.alpha;
        if i == 0 {
            let mut out = -p[0] * j[1] + al2 * (tt * v.cp / v.cr) * az2 * x;
            if self.c.k1 != 0.0 {
                out -= 2.0 * self.c.k1 * v.cr * (z / (x * x));
            }
            out
        } else {
            let mut out = p[1] * j[0] + al2 * (tt * v.sp / v.cr) * az2 * y;
            if self.c.k2 != 0.0 {
                out -= 2.0 * self.c.k2 * v.cr * (z / (y * y));
            }
            out
        }
    }

    /// Value of the named observable, or `None` for an unknown name.
    pub fn eval(&self, name: &str, s: &PhaseState) -> Option<f64> {
        let idx = |c: char| c.to_digit(10).map(|d| d as usize - 1);
        let last = name.chars().last()?;
        let v = self.pt(s);
        let out = match name {
            "Psq" => self.p(s).iter().map(|x| x * x).sum(),
            "Jsq" => self.j(s).iter().map(|x| x * x).sum(),
            "x" => self.xyz(s)[0],
            "y" => self.xyz(s)[1],
            "z" => self.xyz(s)[2],
            "lambda" => 1.0 / (v.cr * v.cr),
            "Az" => self.az(s),
            "V112" => {
                let [x, y, _] = self.xyz(s);
                let rho2 = x * x + y * y;
                let az = self.az(s);
                0.5 * self.c.alpha * self.c.alpha / (1.0 - self.k * rho2) * (rho2 + 4.0 * az * az)
            }
            "K3" => {
                let p3 = self.p(s)[2];
                let az = self.az(s);
                p3 * p3 + 4.0 * self.c.alpha * self.c.alpha * az * az
            }
            "K12_112" => self.k12_112(s),
            "KRL1_112" => self.krl_112(s, 0),
            "KRL2_112" => self.krl_112(s, 1),
            "K11" => self.fradkin(s, 0, 0),
            "K22" => self.fradkin(s, 1, 1),
            "K33" => self.fradkin(s, 2, 2),
            "K12" => self.fradkin(s, 0, 1),
            "K23" => self.fradkin(s, 1, 2),
            "K31" => self.fradkin(s, 2, 0),
            _ if name.starts_with("lambda") => {
                let x = self.xyz(s)[idx(last)?];
                1.0 / (x * x)
            }
            _ if name.starts_with("KRL") => self.krl(s)[idx(last)?],
            _ if name.starts_with("KR") => {
                let i = idx(last)?;
                let r = self.r123(s)[i];
                let q = self.q123(s)[i];
                r * r + 2.0 * self.kk()[i] * q * q
            }
            _ if name.starts_with("KJ") => self.kj(s)[idx(last)?],
            _ if name.starts_with('M') && name.ends_with("re") => self.p(s)[idx(name.chars().nth(1)?)?],
            _ if name.starts_with('M') && name.ends_with("im") => {
                let i = idx(name.chars().nth(1)?)?;
                self.c.alpha * self.tan(s) * self.dir(s)[i]
            }
            _ if name.starts_with('N') && name.ends_with("re") => self.r123(s)[idx(name.chars().nth(1)?)?],
            _ if name.starts_with('N') && name.ends_with("im") => {
                let i = idx(name.chars().nth(1)?)?;
                (2.0 * self.kk()[i]).sqrt() * self.q123(s)[i]
            }
            _ if name.starts_with('P') => self.p(s)[idx(last)?],
            _ if name.starts_with('J') => self.j(s)[idx(last)?],
            _ if name.starts_with('Q') => self.q123(s)[idx(last)?],
            _ if name.starts_with('R') => self.r123(s)[idx(last)?],
            _ => return None,
        };
        Some(out)
    }

    /// Hamiltonian of the given system.
    pub fn hamiltonian(&self, id: SystemId, s: &PhaseState) -> f64 {
        let v = self.pt(s);
        let kin = 0.5 * (v.pr * v.pr + (v.pt * v.pt + v.pp * v.pp / (v.st * v.st)) / (v.sr * v.sr));
        let t = v.sr / v.cr;
        let [x, y, z] = self.xyz(s);
        let [k1, k2, k3] = self.kk();
        let al2 = self.c.alpha * self.c.alpha;
        let kepler = self.c.k * v.cr / v.sr;
        let nl = |x: f64, k: f64| if k != 0.0 { k / (x * x) } else { 0.0 };
        kin + match id {
            SystemId::FreeGeodesic => 0.0,
            SystemId::Oscillator => 0.5 * al2 * t * t,
            SystemId::SmorodinskyWinternitz => 0.5 * al2 * t * t + nl(x, k1) + nl(y, k2) + nl(z, k3),
            SystemId::Oscillator112 => self.eval("V112", s).unwrap() + nl(x, k1) + nl(y, k2),
            SystemId::Kepler => kepler,
            SystemId::Kepler123 => kepler + nl(x, k1) + nl(y, k2) + nl(z, k3),
        }
    }
}
