//! Search for `(d, gamma)` whose admissible window contains a chosen
//! eigenvalue and no other.

use crate::error::{Error, Result};
use crate::kinetics::Jacobian;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolationStatus {
    /// Only the target lies inside the window.
    Unique,
    /// The target shares the window with eigenvalues it cannot be separated from.
    Clustered,
    /// Iteration budget exhausted.
    Failed,
}

impl IsolationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Unique => "UNIQUE",
            Self::Clustered => "CLUSTERED",
            Self::Failed => "FAILED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationOptions {
    pub gamma0: f64,
    /// Initial offset above the critical ratio; `d_c / 5` when `None`.
    pub eps0: Option<f64>,
    pub max_iters: usize,
    /// Relative gap below which eigenvalues count as one cluster.
    pub delta: f64,
}

impl Default for IsolationOptions {
    fn default() -> Self {
        Self {
            gamma0: 10.0,
            eps0: None,
            max_iters: 10_000,
            delta: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub d: f64,
    pub gamma: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationResult {
    pub status: IsolationStatus,
    pub d: f64,
    pub gamma: f64,
    pub window: (f64, f64),
    pub excited: Vec<usize>,
    pub critical_ratio: f64,
    pub iterations: usize,
    pub trace: Vec<TraceStep>,
}

/// Indices of eigenvalues strictly inside the window for `(d, gamma)`;
/// empty when no window exists.
pub fn verify_isolation(eigenvalues: &[f64], j: &Jacobian, d: f64, gamma: f64) -> Vec<usize> {
    match j.wavenumber_window(d, gamma) {
        Ok(w) => inside(eigenvalues, w),
        Err(_) => Vec::new(),
    }
}

fn inside(eigenvalues: &[f64], (lo, hi): (f64, f64)) -> Vec<usize> {
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > lo && l < hi)
        .map(|(i, _)| i)
        .collect()
}

fn near(a: f64, b: f64, delta: f64) -> bool {
    (a - b).abs() <= delta * a.abs().max(b.abs())
}

/// Geometric midpoint of the gamma interval that keeps the target cluster
/// inside `gamma * (l, r)` and its neighbours outside.
fn centred_gamma(eigenvalues: &[f64], t: f64, delta: f64, l: f64, r: f64) -> f64 {
    let below = eigenvalues
        .iter()
        .copied()
        .filter(|&x| x < t && !near(x, t, delta))
        .fold(0.0, f64::max);
    let above = eigenvalues
        .iter()
        .copied()
        .filter(|&x| x > t && !near(x, t, delta))
        .fold(f64::INFINITY, f64::min);
    let g_lo = (t / r).max(below / l);
    let g_hi = (t / l).min(above / r);
    (g_lo * g_hi).sqrt()
}

pub fn isolate_mode(
    eigenvalues: &[f64],
    target: usize,
    j: &Jacobian,
    opts: &IsolationOptions,
) -> Result<IsolationResult> {
    let t = *eigenvalues.get(target).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "target index {target} out of range for {} eigenvalues",
            eigenvalues.len()
        ))
    })?;
    let scale = eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if !(t > 1e-8 * scale) {
        return Err(Error::InvalidArgument(format!(
            "target eigenvalue {t:e} is the constant mode and cannot be isolated"
        )));
    }
    if !(j.trace() < 0.0 && j.det() > 0.0) {
        return Err(Error::NotTuringCapable(
            "uniform state must be stable without diffusion (f_u + g_v < 0, det J > 0)".into(),
        ));
    }
    if !(opts.gamma0 > 0.0) || opts.eps0.is_some_and(|e| !(e > 0.0)) {
        return Err(Error::InvalidArgument("gamma0 and eps0 must be positive".into()));
    }
    let dc = j.critical_ratio()?;
    let eps_step = dc / 100.0;
    let eps_floor = dc / 1000.0;
    let mut eps = opts.eps0.unwrap_or(dc / 5.0).max(eps_floor);
    let mut gamma = opts.gamma0;
    let mut step = 1.0;
    let mut last_dir = 0i8;
    let mut trace = Vec::new();

    let finish = |status, d: f64, gamma: f64, window, iterations, trace: Vec<TraceStep>| IsolationResult {
        status,
        d,
        gamma,
        window,
        excited: inside(eigenvalues, window),
        critical_ratio: dc,
        iterations,
        trace,
    };

    let mut window = (0.0, 0.0);
    for iter in 0..opts.max_iters {
        let d = dc + eps;
        window = j.wavenumber_window(d, gamma)?;
        trace.push(TraceStep { d, gamma, window });
        let (lo, hi) = window;

        // The window scales with gamma: raise it when the target lies above.
        let dir: i8 = if t >= hi {
            1
        } else if t <= lo {
            -1
        } else {
            0
        };
        if dir != 0 {
            if last_dir != 0 && dir != last_dir {
                step *= 0.5;
            }
            last_dir = dir;
            let mut next = gamma + f64::from(dir) * step;
            while next <= 0.0 {
                step *= 0.5;
                next = gamma + f64::from(dir) * step;
            }
            gamma = next;
            continue;
        }

        let excited = inside(eigenvalues, window);
        let far = excited
            .iter()
            .any(|&i| i != target && !near(eigenvalues[i], t, opts.delta));
        // A neighbour closer than the window ratio can only be excluded by an
        // edge next to the target, where the target barely grows.
        let crowded = eigenvalues.iter().any(|&x| {
            x > 0.0 && !near(x, t, opts.delta) && x.max(t) / x.min(t) < hi / lo
        });
        if !far && !crowded {
            let status = if excited.len() == 1 {
                IsolationStatus::Unique
            } else {
                IsolationStatus::Clustered
            };
            // Move the target away from the window edge, where it barely grows.
            let (l, r) = j.unit_window(d)?;
            let g = centred_gamma(eigenvalues, t, opts.delta, l, r);
            let centred = j.wavenumber_window(d, g)?;
            if inside(eigenvalues, centred) == excited {
                trace.push(TraceStep { d, gamma: g, window: centred });
                return Ok(finish(status, d, g, centred, iter + 1, trace));
            }
            return Ok(finish(status, d, gamma, window, iter + 1, trace));
        }
        if eps > eps_floor {
            eps = (eps - eps_step).max(eps_floor);
            step = 1.0;
            last_dir = 0;
            continue;
        }

        // Narrowest window reached. Eigenvalues closer to the target than the
        // window ratio R/L are unresolvable; otherwise place the window in the
        // gap between the neighbours of the target cluster.
        let (l, r) = j.unit_window(d)?;
        let ratio = r / l;
        let unresolved = eigenvalues.iter().any(|&x| {
            x > 0.0 && !near(x, t, opts.delta) && x.max(t) / x.min(t) < ratio
        });
        let g = if unresolved {
            t / (l * r).sqrt()
        } else {
            centred_gamma(eigenvalues, t, opts.delta, l, r)
        };
        let window = j.wavenumber_window(d, g)?;
        trace.push(TraceStep { d, gamma: g, window });
        let excited = inside(eigenvalues, window);
        let status = if excited == [target] {
            IsolationStatus::Unique
        } else if excited.contains(&target) {
            IsolationStatus::Clustered
        } else {
            IsolationStatus::Failed
        };
        return Ok(finish(status, d, g, window, iter + 1, trace));
    }
    let d = dc + eps;
    Ok(finish(IsolationStatus::Failed, d, gamma, window, opts.max_iters, trace))
}
