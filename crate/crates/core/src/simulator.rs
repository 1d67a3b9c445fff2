//! Semi-implicit (IMEX) finite-element time stepping of the two-species
//! reaction-diffusion system `u_t = Lap u + gamma f`, `v_t = d Lap v + gamma g`
//! with homogeneous Neumann boundary conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::{assemble_mass, assemble_stiffness, m_norm};
use crate::kinetics::{KineticsModel, SteadyState};
use crate::linalg::{pcg, CgOptions};
use crate::mesh::Mesh;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Largest accepted time step.
pub const MAX_TAU: f64 = 1e-2;
/// Derivative or field norms above this abort the run.
pub const DIVERGENCE_NORM: f64 = 1e8;
/// Rise of the derivative norm over its running minimum that marks the
/// growth phase and arms the stopping test.
pub const GROWTH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub model: KineticsModel,
    pub d: f64,
    pub gamma: f64,
    pub tau: f64,
    pub stop_tol: f64,
    pub max_time: f64,
    /// The stopping test is armed after this time even if no growth was seen.
    pub min_time: f64,
    pub seed: u64,
    pub amplitude: f64,
    /// Steps between recorded derivative norms.
    pub history_stride: usize,
    /// Steps between snapshot callbacks.
    pub snapshot_stride: usize,
    /// Relative residual for the conjugate gradient solves.
    pub cg_tol: f64,
}

impl SimulationConfig {
    pub fn new(model: KineticsModel, d: f64, gamma: f64) -> Self {
        Self {
            model,
            d,
            gamma,
            tau: 1e-3,
            stop_tol: 1e-4,
            max_time: 100.0,
            min_time: 50.0,
            seed: 0,
            amplitude: 0.01,
            history_stride: 10,
            snapshot_stride: 1000,
            cg_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d", self.d),
            ("tau", self.tau),
            ("stop_tol", self.stop_tol),
            ("max_time", self.max_time),
            ("cg_tol", self.cg_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!("amplitude must be non-negative, got {}", self.amplitude)));
        }
        if !(self.min_time >= 0.0 && self.min_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("min_time must be non-negative, got {}", self.min_time)));
        }
        if self.tau > MAX_TAU {
            return Err(Error::InvalidArgument(format!("tau = {} exceeds {MAX_TAU}", self.tau)));
        }
        if self.history_stride == 0 || self.snapshot_stride == 0 {
            return Err(Error::InvalidArgument("strides must be positive".into()));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationStatus {
    Converged,
    MaxTime,
    Diverged,
}

impl SimulationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "CONVERGED",
            Self::MaxTime => "MAX_TIME",
            Self::Diverged => "DIVERGED",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub time: f64,
    pub steps: usize,
    /// `(t, ||U_t||_M + ||V_t||_M)`
    pub history: Vec<(f64, f64)>,
    pub final_derivative: f64,
    pub status: SimulationStatus,
}

/// `u = u_s - amplitude/2 + amplitude * eps` per vertex with `eps ~ U(0, 1)`,
/// all `u` values drawn before `v`.
pub fn initial_condition<T: Real>(
    mesh: &Mesh<T>,
    state: SteadyState,
    amplitude: f64,
    seed: u64,
) -> (Vec<T>, Vec<T>) {
    let n = mesh.n_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |base: f64| -> Vec<T> {
        (0..n)
            .map(|_| {
                let e: f64 = rng.random();
                T::of(base - 0.5 * amplitude + amplitude * e)
            })
            .collect()
    };
    let u = draw(state.u);
    let v = draw(state.v);
    (u, v)
}

/// Pre-assembled IMEX update
/// `(M/tau + A) U' = M (gamma f(U, V) + U/tau)`,
/// `(M/tau + d A) V' = M (gamma g(U, V) + V/tau)`.
#[derive(Debug, Clone)]
pub struct ImexStepper<T> {
    mass: CsrMatrix<T>,
    system_u: CsrMatrix<T>,
    system_v: CsrMatrix<T>,
    model: KineticsModel,
    gamma: T,
    inv_tau: T,
    cg: CgOptions<T>,
}

impl<T: Real> ImexStepper<T> {
    pub fn new(mass: CsrMatrix<T>, stiffness: &CsrMatrix<T>, config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        let inv_tau = T::of(1.0 / config.tau);
        let system_u = mass.linear_combination(inv_tau, stiffness, T::one())?;
        let system_v = mass.linear_combination(inv_tau, stiffness, T::of(config.d))?;
        let n = mass.order();
        Ok(Self {
            mass,
            system_u,
            system_v,
            model: config.model,
            gamma: T::of(config.gamma),
            inv_tau,
            cg: CgOptions::new(T::of(config.cg_tol), 10 * n + 100),
        })
    }

    pub fn mass(&self) -> &CsrMatrix<T> {
        &self.mass
    }

    /// Advances one step; `u_next`/`v_next` hold the initial guesses on entry.
    pub fn step(&self, u: &[T], v: &[T], u_next: &mut [T], v_next: &mut [T]) -> Result<()> {
        let n = u.len();
        let mut load_u = Vec::with_capacity(n);
        let mut load_v = Vec::with_capacity(n);
        for (&ui, &vi) in u.iter().zip(v) {
            let (f, g) = self.model.reaction(ui, vi);
            load_u.push(self.gamma * f + ui * self.inv_tau);
            load_v.push(self.gamma * g + vi * self.inv_tau);
        }
        let rhs_u = self.mass.mul_vec(&load_u);
        let rhs_v = self.mass.mul_vec(&load_v);
        pcg(&self.system_u, &rhs_u, u_next, &self.cg)?;
        pcg(&self.system_v, &rhs_v, v_next, &self.cg)?;
        Ok(())
    }
}

/// Convenience single step from assembled matrices.
pub fn imex_step<T: Real>(
    u: &[T],
    v: &[T],
    mass: &CsrMatrix<T>,
    stiffness: &CsrMatrix<T>,
    config: &SimulationConfig,
) -> Result<(Vec<T>, Vec<T>)> {
    let stepper = ImexStepper::new(mass.clone(), stiffness, config)?;
    let mut un = u.to_vec();
    let mut vn = v.to_vec();
    stepper.step(u, v, &mut un, &mut vn)?;
    Ok((un, vn))
}

/// Runs from the seeded perturbation of the model's steady state.
pub fn simulate<T: Real>(mesh: &Mesh<T>, config: &SimulationConfig) -> Result<SimulationOutcome<T>> {
    let state = config.model.steady_state()?;
    let (u, v) = initial_condition(mesh, state, config.amplitude, config.seed);
    simulate_from(mesh, config, u, v, |_, _, _, _| Ok(()))
}

/// Runs from given fields; `snapshot(step, t, u, v)` is called for the initial
/// state, every `snapshot_stride` steps and for the final state.
pub fn simulate_from<T: Real, F>(
    mesh: &Mesh<T>,
    config: &SimulationConfig,
    mut u: Vec<T>,
    mut v: Vec<T>,
    mut snapshot: F,
) -> Result<SimulationOutcome<T>>
where
    F: FnMut(usize, f64, &[T], &[T]) -> Result<()>,
{
    config.validate()?;
    let n = mesh.n_vertices();
    if u.len() != n || v.len() != n {
        return Err(Error::FieldLength {
            name: "initial condition".into(),
            found: u.len().min(v.len()),
            expected: n,
        });
    }
    let mass = assemble_mass(mesh)?;
    let stiffness = assemble_stiffness(mesh)?;
    let stepper = ImexStepper::new(mass, &stiffness, config)?;
    let inv_tau = T::of(1.0 / config.tau);

    let mut un = u.clone();
    let mut vn = v.clone();
    let mut du = vec![T::zero(); n];
    let mut dv = vec![T::zero(); n];
    let mut history = Vec::new();
    let mut step = 0usize;
    let mut time = 0.0;
    let mut derivative = f64::INFINITY;
    let mut lowest = f64::INFINITY;
    let mut armed = config.min_time <= 0.0;
    snapshot(0, 0.0, &u, &v)?;
    let status = loop {
        if time >= config.max_time - 0.5 * config.tau {
            break SimulationStatus::MaxTime;
        }
        stepper.step(&u, &v, &mut un, &mut vn)?;
        step += 1;
        time = step as f64 * config.tau;
        for i in 0..n {
            du[i] = (un[i] - u[i]) * inv_tau;
            dv[i] = (vn[i] - v[i]) * inv_tau;
        }
        std::mem::swap(&mut u, &mut un);
        std::mem::swap(&mut v, &mut vn);
        let finite = u.iter().chain(v.iter()).all(|x| x.is_finite());
        derivative = if finite {
            (m_norm(stepper.mass(), &du)? + m_norm(stepper.mass(), &dv)?).to_f64_lossy()
        } else {
            f64::NAN
        };
        if step == 1 || step % config.history_stride == 0 {
            history.push((time, derivative));
        }
        if !derivative.is_finite() || derivative > DIVERGENCE_NORM {
            break SimulationStatus::Diverged;
        }
        let size = (m_norm(stepper.mass(), &u)? + m_norm(stepper.mass(), &v)?).to_f64_lossy();
        if size > DIVERGENCE_NORM {
            break SimulationStatus::Diverged;
        }
        if step % config.snapshot_stride == 0 {
            snapshot(step, time, &u, &v)?;
        }
        lowest = lowest.min(derivative);
        armed = armed || time >= config.min_time || derivative >= GROWTH_FACTOR * lowest;
        if armed && derivative < config.stop_tol {
            break SimulationStatus::Converged;
        }
    };
    if history.last().map(|h| h.0) != Some(time) && step > 0 {
        history.push((time, derivative));
    }
    if status != SimulationStatus::Diverged && step % config.snapshot_stride != 0 {
        snapshot(step, time, &u, &v)?;
    }
    Ok(SimulationOutcome {
        u,
        v,
        time,
        steps: step,
        history,
        final_derivative: derivative,
        status,
    })
}
