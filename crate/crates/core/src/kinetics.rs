//! Two-species reaction kinetics: steady states, Jacobians, the Turing
//! conditions, the dispersion relation and the admissible wavenumber window.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reaction model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KineticsModel {
    /// `f = a - u + u^2 v`, `g = b - u^2 v`
    Schnakenberg { a: f64, b: f64 },
    /// `f = a - b u + u^2 / (v (1 + k u^2))`, `g = u^2 - v`
    GiererMeinhardt { a: f64, b: f64, k: f64 },
    /// `f = a - u - h`, `g = alpha (b - v) - h`, `h = rho u v / (1 + u + K u^2)`
    Thomas { a: f64, b: f64, big_k: f64, alpha: f64, rho: f64 },
}

impl KineticsModel {
    pub fn schnakenberg() -> Self {
        Self::Schnakenberg { a: 0.1, b: 0.9 }
    }

    pub fn gierer_meinhardt() -> Self {
        Self::GiererMeinhardt { a: 0.1, b: 1.0, k: 0.5 }
    }

    pub fn thomas() -> Self {
        Self::Thomas {
            a: 150.0,
            b: 100.0,
            big_k: 0.05,
            alpha: 1.5,
            rho: 13.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Schnakenberg { .. } => "schnakenberg",
            Self::GiererMeinhardt { .. } => "gierer-meinhardt",
            Self::Thomas { .. } => "thomas",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{}: {what}", self.name())));
        match *self {
            Self::Schnakenberg { a, b } => {
                if !(a > 0.0 && b > 0.0) {
                    return bad("a and b must be positive");
                }
            }
            Self::GiererMeinhardt { a, b, k } => {
                if !(a > 0.0 && b > 0.0 && k >= 0.0) {
                    return bad("a and b must be positive and k non-negative");
                }
            }
            Self::Thomas { a, b, big_k, alpha, rho } => {
                if ![a, b, big_k, alpha, rho].iter().all(|x| *x >= 0.0 && x.is_finite()) {
                    return bad("parameters must be non-negative");
                }
            }
        }
        Ok(())
    }

    /// `(f(u, v), g(u, v))`
    pub fn reaction<T: Real>(&self, u: T, v: T) -> (T, T) {
        match *self {
            Self::Schnakenberg { a, b } => {
                let uuv = u * u * v;
                (T::of(a) - u + uuv, T::of(b) - uuv)
            }
            Self::GiererMeinhardt { a, b, k } => {
                let uu = u * u;
                (T::of(a) - T::of(b) * u + uu / (v * (T::one() + T::of(k) * uu)), uu - v)
            }
            Self::Thomas { a, b, big_k, alpha, rho } => {
                let h = T::of(rho) * u * v / (T::one() + u + T::of(big_k) * u * u);
                (T::of(a) - u - h, T::of(alpha) * (T::of(b) - v) - h)
            }
        }
    }

    /// Analytic partial derivatives at `(u, v)`.
    pub fn jacobian_at(&self, u: f64, v: f64) -> Jacobian {
        match *self {
            Self::Schnakenberg { .. } => Jacobian {
                fu: -1.0 + 2.0 * u * v,
                fv: u * u,
                gu: -2.0 * u * v,
                gv: -u * u,
            },
            Self::GiererMeinhardt { b, k, .. } => {
                let s = 1.0 + k * u * u;
                Jacobian {
                    fu: -b + 2.0 * u / (v * s * s),
                    fv: -u * u / (v * v * s),
                    gu: 2.0 * u,
                    gv: -1.0,
                }
            }
            Self::Thomas { big_k, alpha, rho, .. } => {
                let den = 1.0 + u + big_k * u * u;
                let hu = rho * v * (1.0 - big_k * u * u) / (den * den);
                let hv = rho * u / den;
                Jacobian {
                    fu: -1.0 - hu,
                    fv: -hv,
                    gu: -hu,
                    gv: -alpha - hv,
                }
            }
        }
    }

    pub fn jacobian(&self, state: SteadyState) -> Jacobian {
        self.jacobian_at(state.u, state.v)
    }

    /// Spatially uniform steady state.
    pub fn steady_state(&self) -> Result<SteadyState> {
        self.validate()?;
        let state = match *self {
            Self::Schnakenberg { a, b } => SteadyState {
                u: a + b,
                v: b / ((a + b) * (a + b)),
            },
            Self::GiererMeinhardt { .. } => self.newton_2d(1.0, 1.0)?,
            Self::Thomas { a, b, alpha, .. } => {
                // f - g = a - u - alpha (b - v) gives u as a function of v.
                let u_of = |v: f64| a - alpha * b + alpha * v;
                let v = self.newton_1d(b / 4.0, u_of)?;
                SteadyState { u: u_of(v), v }
            }
        };
        let residual = self.scaled_residual(state.u, state.v);
        if !(residual < 1e-9) || !(state.u > 0.0 && state.v > 0.0) {
            return Err(Error::NewtonNotConverged {
                model: self.name().into(),
                residual,
            });
        }
        Ok(state)
    }

    fn scaled_residual(&self, u: f64, v: f64) -> f64 {
        let (f, g) = self.reaction(u, v);
        f.abs().max(g.abs()) / u.abs().max(1.0)
    }

    fn newton_2d(&self, u0: f64, v0: f64) -> Result<SteadyState> {
        let (mut u, mut v) = (u0, v0);
        let norm = |u: f64, v: f64| {
            let (f, g) = self.reaction(u, v);
            (f * f + g * g).sqrt()
        };
        let mut r = norm(u, v);
        for _ in 0..MAX_NEWTON {
            if self.scaled_residual(u, v) < 1e-13 {
                break;
            }
            let (f, g) = self.reaction(u, v);
            let j = self.jacobian_at(u, v);
            let det = j.det();
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let du = -(j.gv * f - j.fv * g) / det;
            let dv = -(-j.gu * f + j.fu * g) / det;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let (un, vn) = (u + step * du, v + step * dv);
                let rn = norm(un, vn);
                if un > 0.0 && vn > 0.0 && rn < r {
                    u = un;
                    v = vn;
                    r = rn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok(SteadyState { u, v })
    }

    fn newton_1d(&self, v0: f64, u_of: impl Fn(f64) -> f64) -> Result<f64> {
        let Self::Thomas { alpha, .. } = *self else {
            unreachable!("one-dimensional reduction is specific to the Thomas model")
        };
        let phi = |v: f64| self.reaction(u_of(v), v).1;
        let mut v = v0;
        let mut r = phi(v).abs();
        for _ in 0..MAX_NEWTON {
            if self.scaled_residual(u_of(v), v) < 1e-13 {
                break;
            }
            let j = self.jacobian_at(u_of(v), v);
            let dphi = j.gu * alpha + j.gv;
            if dphi == 0.0 || !dphi.is_finite() {
                break;
            }
            let dv = -phi(v) / dphi;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let vn = v + step * dv;
                let rn = phi(vn).abs();
                if vn > 0.0 && u_of(vn) > 0.0 && rn < r {
                    v = vn;
                    r = rn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok(v)
    }
}

const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub u: f64,
    pub v: f64,
}

/// Kinetics Jacobian at a steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub fu: f64,
    pub fv: f64,
    pub gu: f64,
    pub gv: f64,
}

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.fu + self.gv
    }

    pub fn det(&self) -> f64 {
        self.fu * self.gv - self.fv * self.gu
    }

    fn growth_term(&self, d: f64) -> f64 {
        d * self.fu + self.gv
    }

    fn discriminant(&self, d: f64) -> f64 {
        let h = self.growth_term(d);
        h * h - 4.0 * d * self.det()
    }

    /// `c(k^2) = d k^4 - gamma (d f_u + g_v) k^2 + gamma^2 det J`; negative for growing modes.
    pub fn dispersion(&self, d: f64, gamma: f64, k2: f64) -> f64 {
        d * k2 * k2 - gamma * self.growth_term(d) * k2 + gamma * gamma * self.det()
    }

    /// Roots `(k2_minus, k2_plus)` of the dispersion relation.
    pub fn wavenumber_window(&self, d: f64, gamma: f64) -> Result<(f64, f64)> {
        let h = self.growth_term(d);
        let disc = self.discriminant(d);
        if !(h > 0.0) || !(disc > 0.0) {
            return Err(Error::NoWindow(format!(
                "d = {d}: d f_u + g_v = {h:.6}, discriminant = {disc:.6}"
            )));
        }
        let s = disc.sqrt();
        // Product of roots is gamma^2 det / d; use it for the smaller root to avoid cancellation.
        let plus = gamma * (h + s) / (2.0 * d);
        let minus = gamma * gamma * self.det() / (d * plus);
        Ok((minus, plus))
    }

    /// `gamma`-independent window `(L, R)` with `k2_minus = gamma L`, `k2_plus = gamma R`.
    pub fn unit_window(&self, d: f64) -> Result<(f64, f64)> {
        self.wavenumber_window(d, 1.0)
    }

    /// Critical diffusion ratio: the root of
    /// `d^2 f_u^2 + 2 (2 f_v g_u - f_u g_v) d + g_v^2 = 0` above which a window exists.
    pub fn critical_ratio(&self) -> Result<f64> {
        let qa = self.fu * self.fu;
        let qb = 2.0 * (2.0 * self.fv * self.gu - self.fu * self.gv);
        let qc = self.gv * self.gv;
        if qa == 0.0 {
            return Err(Error::NotTuringCapable("f_u = 0".into()));
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::NotTuringCapable("critical-ratio quadratic has no real roots".into()));
        }
        let s = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * s);
        let mut roots = [q / qa, if q != 0.0 { qc / q } else { q / qa }];
        roots.sort_by(f64::total_cmp);
        roots
            .into_iter()
            .filter(|&r| r > 0.0)
            .find(|&r| {
                let above = r * (1.0 + 1e-6);
                self.growth_term(above) > 0.0 && self.discriminant(above) > 0.0
            })
            .ok_or_else(|| Error::NotTuringCapable("no positive root admits a window".into()))
    }

    /// Evaluates the four conditions for diffusion-driven instability at ratio `d`.
    pub fn turing_check(&self, d: f64) -> TuringReport {
        let growth = self.growth_term(d) > 0.0;
        let disc = self.discriminant(d) > 0.0;
        TuringReport {
            trace_negative: self.trace() < 0.0,
            det_positive: self.det() > 0.0,
            growth_positive: growth,
            discriminant_positive: disc,
            critical_ratio: self.critical_ratio().ok(),
            unit_window: if growth && disc { self.unit_window(d).ok() } else { None },
        }
    }
}

/// The four conditions, the critical ratio and the window per unit `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuringReport {
    /// `f_u + g_v < 0`
    pub trace_negative: bool,
    /// `f_u g_v - f_v g_u > 0`
    pub det_positive: bool,
    /// `d f_u + g_v > 0`
    pub growth_positive: bool,
    /// `(d f_u + g_v)^2 - 4 d det J > 0`
    pub discriminant_positive: bool,
    pub critical_ratio: Option<f64>,
    pub unit_window: Option<(f64, f64)>,
}

impl TuringReport {
    pub fn all_hold(&self) -> bool {
        self.trace_negative && self.det_positive && self.growth_positive && self.discriminant_positive
    }
}
