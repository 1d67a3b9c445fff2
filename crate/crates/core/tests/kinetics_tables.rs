use modeiso::kinetics::{Jacobian, KineticsModel};
use modeiso::reference::sphere_bulk_spectrum;

fn models() -> [KineticsModel; 3] {
    [KineticsModel::schnakenberg(), KineticsModel::gierer_meinhardt(), KineticsModel::thomas()]
}

fn central_differences(m: &KineticsModel, u: f64, v: f64) -> Jacobian {
    let h = 1e-6;
    let du = |s: f64| m.reaction(u + s * h, v);
    let dv = |s: f64| m.reaction(u, v + s * h);
    let (fp, gp) = du(1.0);
    let (fm, gm) = du(-1.0);
    let (fvp, gvp) = dv(1.0);
    let (fvm, gvm) = dv(-1.0);
    Jacobian {
        fu: (fp - fm) / (2.0 * h),
        fv: (fvp - fvm) / (2.0 * h),
        gu: (gp - gm) / (2.0 * h),
        gv: (gvp - gvm) / (2.0 * h),
    }
}

#[test]
fn jacobians_match_central_differences() {
    for m in models() {
        let s = m.steady_state().unwrap();
        let a = m.jacobian(s);
        let fd = central_differences(&m, s.u, s.v);
        for (x, y) in [(a.fu, fd.fu), (a.fv, fd.fv), (a.gu, fd.gu), (a.gv, fd.gv)] {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-3), "{}: {x} vs {y}", m.name());
        }
    }
}

#[test]
fn steady_state_residuals_are_small() {
    for m in models() {
        let s = m.steady_state().unwrap();
        let (f, g) = m.reaction(s.u, s.v);
        assert!(f.abs().max(g.abs()) / s.u.max(1.0) < 1e-9);
    }
}

/// Labels `(l, n)` of the ball wavenumbers inside the open window.
fn excited(model: KineticsModel, d: f64, gamma: f64) -> (Vec<(usize, usize)>, f64) {
    let j = model.jacobian(model.steady_state().unwrap());
    let (lo, hi) = j.wavenumber_window(d, gamma).unwrap();
    let spectrum = sphere_bulk_spectrum(400).unwrap();
    let mut labels: Vec<(usize, usize)> = spectrum
        .iter()
        .filter(|e| e.value > lo && e.value < hi)
        .map(|e| e.label)
        .collect();
    labels.dedup();
    assert!(spectrum.last().unwrap().value > hi + 5.0);
    (labels, hi)
}

#[test]
fn schnakenberg_table_windows() {
    let j = KineticsModel::schnakenberg().jacobian(KineticsModel::schnakenberg().steady_state().unwrap());
    let rows = [
        (10.0, 15.0, 1.7321, 2.7386),
        (10.0, 40.0, 2.8284, 4.4721),
        (9.0, 60.0, 3.9319, 5.0866),
        (8.81, 85.0, 4.8575, 5.8955),
    ];
    for (d, gamma, km, kp) in rows {
        let (lo, hi) = j.wavenumber_window(d, gamma).unwrap();
        assert!((lo.sqrt() - km).abs() < 5e-5, "d={d} gamma={gamma}: k- = {}", lo.sqrt());
        assert!((hi.sqrt() - kp).abs() < 5e-5, "d={d} gamma={gamma}: k+ = {}", hi.sqrt());
    }
}

#[test]
fn table_rows_excite_the_listed_wavenumbers() {
    let s = KineticsModel::schnakenberg();
    let gm = KineticsModel::gierer_meinhardt();
    let th = KineticsModel::thomas();
    let k11 = vec![(1, 1)];
    let k21 = vec![(2, 1)];
    let pair = vec![(0, 2), (3, 1)];
    let k41 = vec![(4, 1)];
    // k_{1,2} = 5.9404 also lies below k+ = 5.9949 for Thomas at (27.5, 90).
    let k41_k12 = vec![(4, 1), (1, 2)];
    let rows = [
        (s, 10.0, 15.0, &k11),
        (s, 10.0, 40.0, &k21),
        (s, 9.0, 60.0, &pair),
        (s, 8.81, 85.0, &k41),
        (gm, 74.0, 30.0, &k11),
        (gm, 74.0, 80.0, &k21),
        (gm, 74.0, 160.0, &pair),
        (gm, 72.0, 200.0, &k41),
        (th, 30.0, 15.0, &k11),
        (th, 30.0, 40.0, &k21),
        (th, 28.0, 60.0, &pair),
        (th, 27.5, 90.0, &k41_k12),
    ];
    for (model, d, gamma, want) in rows {
        let (got, _) = excited(model, d, gamma);
        assert_eq!(&got, want, "{} d={d} gamma={gamma}", model.name());
    }
}
