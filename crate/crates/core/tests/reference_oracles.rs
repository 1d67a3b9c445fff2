use modeiso::eigen::smallest_eigenpairs;
use modeiso::mesh::{generate_icosphere, generate_rectangle};
use modeiso::reference::{real_spherical_harmonic, rectangle_neumann};
use modeiso::{assemble_mass, assemble_stiffness, interpolate};

#[test]
fn constant_harmonic_normalized_on_icosphere3() {
    let mesh = generate_icosphere::<f64>(3).unwrap();
    let m = assemble_mass(&mesh).unwrap();
    let y = interpolate(|p| real_spherical_harmonic(0, 0, p).unwrap(), &mesh).into_values();
    assert!((m.bilinear(&y, &y) - 1.0).abs() < 0.01);
}

#[test]
fn harmonics_are_normalized_and_orthogonal_on_fine_icosphere() {
    let mesh = generate_icosphere::<f64>(4).unwrap();
    let m = assemble_mass(&mesh).unwrap();
    for l in 0..=4usize {
        let fields: Vec<Vec<f64>> = (-(l as i64)..=l as i64)
            .map(|mm| {
                interpolate(
                    |p| {
                        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                        real_spherical_harmonic(l, mm, [p[0] / r, p[1] / r, p[2] / r]).unwrap()
                    },
                    &mesh,
                )
                .into_values()
            })
            .collect();
        for (i, a) in fields.iter().enumerate() {
            for (j, b) in fields.iter().enumerate() {
                let ip = m.bilinear(a, b);
                if i == j {
                    assert!((ip - 1.0).abs() < 0.02, "l={l}: norm {ip}");
                } else {
                    assert!(ip.abs() < 1e-2, "l={l}: <{i},{j}> = {ip}");
                }
            }
        }
    }
}

#[test]
fn rectangle_eigenvalues_converge_at_second_order() {
    let exact: Vec<f64> = rectangle_neumann(2.0, 1.0, 10).unwrap().iter().map(|e| e.value).collect();
    let errors: Vec<Vec<f64>> = [8usize, 16, 32]
        .iter()
        .map(|&n| {
            let mesh = generate_rectangle(2.0, 1.0, 2 * n, n).unwrap();
            let a = assemble_stiffness(&mesh).unwrap();
            let m = assemble_mass(&mesh).unwrap();
            let s = smallest_eigenpairs(&a, &m, 10, 1e-9, 0).unwrap();
            s.eigenvalues.iter().zip(&exact).map(|(x, e)| x - e).collect()
        })
        .collect();
    for i in 1..10 {
        // Halving h should cut the error by about four.
        let r1 = errors[0][i] / errors[1][i];
        let r2 = errors[1][i] / errors[2][i];
        assert!(errors[2][i] > 0.0);
        assert!(r1 > 3.0 && r2 > 3.5, "mode {i}: ratios {r1} {r2}");
    }
}
