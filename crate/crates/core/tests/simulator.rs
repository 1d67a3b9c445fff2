use modeiso::kinetics::KineticsModel;
use modeiso::mesh::{generate_icosphere, generate_rectangle};
use modeiso::simulator::{imex_step, initial_condition, simulate, ImexStepper, SimulationConfig, SimulationStatus};
use modeiso::*;

fn total(m: &CsrMatrix64, u: &[f64]) -> f64 {
    m.mul_vec(u).iter().sum()
}

#[test]
fn pure_diffusion_conserves_mass() {
    let mesh = generate_rectangle(1.0, 1.0, 10, 10).unwrap();
    let m = assemble_mass(&mesh).unwrap();
    let a = assemble_stiffness(&mesh).unwrap();
    let model = KineticsModel::schnakenberg();
    let cfg = SimulationConfig::new(model, 10.0, 0.0);
    let stepper = ImexStepper::new(m.clone(), &a, &cfg).unwrap();
    let (mut u, mut v) = initial_condition(&mesh, model.steady_state().unwrap(), 0.5, 9);
    let (mut un, mut vn) = (u.clone(), v.clone());
    let (mu0, mv0) = (total(&m, &u), total(&m, &v));
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (pu, pv) = (total(&m, &u), total(&m, &v));
        stepper.step(&u, &v, &mut un, &mut vn).unwrap();
        std::mem::swap(&mut u, &mut un);
        std::mem::swap(&mut v, &mut vn);
        worst = worst
            .max((total(&m, &u) - pu).abs() / pu.abs())
            .max((total(&m, &v) - pv).abs() / pv.abs());
    }
    assert!(worst < 1e-9, "per-step mass drift {worst:e}");
    assert!((total(&m, &u) - mu0).abs() / mu0 < 1e-8);
    assert!((total(&m, &v) - mv0).abs() / mv0 < 1e-8);
}

#[test]
fn steady_state_is_a_fixed_point() {
    for model in [KineticsModel::schnakenberg(), KineticsModel::gierer_meinhardt(), KineticsModel::thomas()] {
        let mesh = generate_icosphere(1).unwrap();
        let m = assemble_mass(&mesh).unwrap();
        let a = assemble_stiffness(&mesh).unwrap();
        let s = model.steady_state().unwrap();
        let cfg = SimulationConfig::new(model, 30.0, 50.0);
        let stepper = ImexStepper::new(m, &a, &cfg).unwrap();
        let (mut u, mut v): (Vec<f64>, Vec<f64>) = initial_condition(&mesh, s, 0.0, 0);
        let (mut un, mut vn) = (u.clone(), v.clone());
        for _ in 0..1000 {
            stepper.step(&u, &v, &mut un, &mut vn).unwrap();
            std::mem::swap(&mut u, &mut un);
            std::mem::swap(&mut v, &mut vn);
        }
        let du = u.iter().fold(0.0f64, |e, x| e.max((x - s.u).abs()));
        let dv = v.iter().fold(0.0f64, |e, x| e.max((x - s.v).abs()));
        assert!(du.max(dv) < 1e-10 * s.u.abs().max(s.v.abs()).max(1.0), "{} drift {du:e} {dv:e}", model.name());
    }
}

#[test]
fn stable_regime_returns_to_uniform_state() {
    let mesh = generate_rectangle(1.0, 1.0, 16, 16).unwrap();
    let model = KineticsModel::schnakenberg();
    let s = model.steady_state().unwrap();
    let cfg = SimulationConfig::new(model, 1.0, 30.0);
    let out = simulate(&mesh, &cfg).unwrap();
    assert_eq!(out.status, SimulationStatus::Converged);
    let dev = out
        .u
        .iter()
        .map(|x| (x - s.u).abs())
        .chain(out.v.iter().map(|x| (x - s.v).abs()))
        .fold(0.0f64, f64::max);
    assert!(dev < 1e-4, "deviation {dev:e}");
}

#[test]
fn runs_are_reproducible() {
    let mesh = generate_rectangle(1.0, 1.0, 6, 6).unwrap();
    let mut cfg = SimulationConfig::new(KineticsModel::schnakenberg(), 10.0, 40.0);
    cfg.max_time = 0.5;
    cfg.seed = 11;
    let a = simulate(&mesh, &cfg).unwrap();
    let b = simulate(&mesh, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.status, SimulationStatus::MaxTime);
    assert_eq!(a.steps, 500);
    cfg.seed = 12;
    assert_ne!(simulate(&mesh, &cfg).unwrap().u, a.u);
}

#[test]
fn single_step_helper_matches_stepper() {
    let mesh = generate_rectangle(1.0, 1.0, 5, 5).unwrap();
    let m = assemble_mass(&mesh).unwrap();
    let a = assemble_stiffness(&mesh).unwrap();
    let model = KineticsModel::gierer_meinhardt();
    let cfg = SimulationConfig::new(model, 30.0, 20.0);
    let (u, v) = initial_condition(&mesh, model.steady_state().unwrap(), 0.1, 2);
    let (u1, v1) = imex_step(&u, &v, &m, &a, &cfg).unwrap();
    let stepper = ImexStepper::new(m, &a, &cfg).unwrap();
    let (mut u2, mut v2) = (u.clone(), v.clone());
    stepper.step(&u, &v, &mut u2, &mut v2).unwrap();
    assert_eq!((u1, v1), (u2, v2));
}
