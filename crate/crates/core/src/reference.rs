//! Analytic Neumann spectra used as oracles: intervals, rectangles, the
//! sphere surface and the solid ball, plus real spherical harmonics.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Eigenvalue with its multiplicity and index label (`(m, n)` for boxes,
/// `(l, n)` for spheres).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticEigenvalue {
    pub value: f64,
    pub multiplicity: usize,
    pub label: (usize, usize),
}

/// First `count` Neumann eigenvalues `n^2 pi^2 / L^2` of an interval.
pub fn interval_neumann(length: f64, count: usize) -> Vec<AnalyticEigenvalue> {
    (0..count)
        .map(|n| AnalyticEigenvalue {
            value: (n as f64 * PI / length).powi(2),
            multiplicity: 1,
            label: (n, 0),
        })
        .collect()
}

fn with_multiplicities(mut list: Vec<AnalyticEigenvalue>) -> Vec<AnalyticEigenvalue> {
    let mut start = 0;
    while start < list.len() {
        let mut end = start + 1;
        let v = list[start].value;
        while end < list.len() && (list[end].value - v).abs() <= 1e-12 * v.max(1.0) {
            end += 1;
        }
        for e in &mut list[start..end] {
            e.multiplicity = end - start;
        }
        start = end;
    }
    list
}

/// First `count` values of `pi^2 (m^2/lx^2 + n^2/ly^2)`, sorted.
pub fn rectangle_neumann(lx: f64, ly: f64, count: usize) -> Result<Vec<AnalyticEigenvalue>> {
    if !(lx > 0.0 && ly > 0.0) {
        return Err(Error::InvalidArgument(format!("rectangle sides must be positive, got {lx} x {ly}")));
    }
    let mut all = Vec::with_capacity(count * count);
    for m in 0..count.max(1) {
        for n in 0..count.max(1) {
            let value = PI * PI * ((m as f64 / lx).powi(2) + (n as f64 / ly).powi(2));
            all.push(AnalyticEigenvalue { value, multiplicity: 1, label: (m, n) });
        }
    }
    all.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.label.cmp(&b.label)));
    // Complete the last cluster before truncating so multiplicities are exact.
    let all = with_multiplicities(all);
    Ok(all.into_iter().take(count).collect())
}

/// First `count` eigenvalues `l(l+1)` of the unit sphere surface, each
/// repeated `2l + 1` times.
pub fn sphere_surface_spectrum(count: usize) -> Vec<AnalyticEigenvalue> {
    let mut out = Vec::with_capacity(count);
    let mut l = 0;
    while out.len() < count {
        let mult = 2 * l + 1;
        for _ in 0..mult.min(count - out.len()) {
            out.push(AnalyticEigenvalue {
                value: (l * (l + 1)) as f64,
                multiplicity: mult,
                label: (l, 1),
            });
        }
        l += 1;
    }
    out
}

fn bessel_series(l: usize, x: f64) -> f64 {
    // j_l(x) = x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    let mut prefactor = 1.0;
    for i in 0..l {
        prefactor *= x / (2 * i + 3) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    prefactor * sum
}

fn bessel_upward(l: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let mut jm = s / x;
    if l == 0 {
        return jm;
    }
    let mut j = s / (x * x) - c / x;
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * j - jm;
        jm = j;
        j = next;
    }
    j
}

/// Spherical Bessel function `j_l(x)`.
pub fn spherical_bessel(l: usize, x: f64) -> f64 {
    if x < (l + 1) as f64 {
        bessel_series(l, x)
    } else {
        bessel_upward(l, x)
    }
}

/// `(j_l(x), j_l'(x))` with `j_l' = (l/x) j_l - j_{l+1}`.
pub fn spherical_bessel_j(l: usize, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("spherical Bessel argument must be positive, got {x}")));
    }
    let j = spherical_bessel(l, x);
    Ok((j, l as f64 / x * j - spherical_bessel(l + 1, x)))
}

/// Root scan for `j_l'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootScan {
    pub max: f64,
    pub step: f64,
    pub tol: f64,
}

impl Default for RootScan {
    fn default() -> Self {
        Self { max: 20.0, step: 0.05, tol: 1e-10 }
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive zeros of `j_l'` in `(0, scan.max]`, ascending.
pub fn bessel_derivative_roots(l: usize, scan: &RootScan) -> Vec<f64> {
    let deriv = |x: f64| spherical_bessel_j(l, x).map(|d| d.1).unwrap_or(f64::NAN);
    let mut roots = Vec::new();
    let mut a = scan.step;
    let mut fa = deriv(a);
    while a < scan.max {
        let b = (a + scan.step).min(scan.max);
        let fb = deriv(b);
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(deriv, a, b, scan.tol));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Wavenumber `k_{l,n}` of the ball: the `n`-th zero of `j_l'`, counting the
/// constant mode `k_{0,1} = 0` for `l = 0`.
pub fn ball_wavenumber(l: usize, n: usize, scan: &RootScan) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("radial index starts at 1".into()));
    }
    let roots = bessel_derivative_roots(l, scan);
    let index = if l == 0 { n.checked_sub(2) } else { Some(n - 1) };
    match index {
        None => Ok(0.0),
        Some(i) => roots.get(i).copied().ok_or_else(|| {
            Error::BracketNotFound(format!("k_({l},{n}) beyond scan range (0, {}]", scan.max))
        }),
    }
}

/// First `count` Neumann eigenvalues `k_{l,n}^2` of the unit ball, each
/// repeated `2l + 1` times.
pub fn sphere_bulk_spectrum(count: usize) -> Result<Vec<AnalyticEigenvalue>> {
    sphere_bulk_spectrum_with(count, &RootScan::default())
}

pub fn sphere_bulk_spectrum_with(count: usize, scan: &RootScan) -> Result<Vec<AnalyticEigenvalue>> {
    let mut levels = Vec::new();
    levels.push(AnalyticEigenvalue { value: 0.0, multiplicity: 1, label: (0, 1) });
    // First zero of j_l' grows with l, so stop once a level has none in range.
    let mut complete_below = f64::INFINITY;
    for l in 0.. {
        let roots = bessel_derivative_roots(l, scan);
        if roots.is_empty() {
            complete_below = complete_below.min(scan.max * scan.max);
            break;
        }
        let offset = if l == 0 { 2 } else { 1 };
        for (i, k) in roots.iter().enumerate() {
            levels.push(AnalyticEigenvalue {
                value: k * k,
                multiplicity: 2 * l + 1,
                label: (l, i + offset),
            });
        }
    }
    levels.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out = Vec::with_capacity(count);
    for e in levels {
        if out.len() >= count {
            break;
        }
        if e.value > complete_below {
            break;
        }
        for _ in 0..e.multiplicity.min(count - out.len()) {
            out.push(e);
        }
    }
    if out.len() < count {
        return Err(Error::BracketNotFound(format!(
            "only {} ball eigenvalues below k = {}",
            out.len(),
            scan.max
        )));
    }
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Associated Legendre function without the Condon-Shortley phase, `m >= 0`.
fn legendre(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= (2 * i + 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in m + 2..=l {
        p = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = p;
    }
    p
}

/// Orthonormal real spherical harmonic: `cos(m phi)` for `m > 0`,
/// `sin(|m| phi)` for `m < 0`, so that `Y_1^1 = sqrt(3/4pi) x`.
pub fn real_spherical_harmonic(l: usize, m: i64, point: [f64; 3]) -> Result<f64> {
    let r = (point[0] * point[0] + point[1] * point[1] + point[2] * point[2]).sqrt();
    if (r - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("point at radius {r} is not on the unit sphere")));
    }
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Err(Error::InvalidArgument(format!("order {m} out of range for degree {l}")));
    }
    let phi = point[1].atan2(point[0]);
    let p = legendre(l, am, point[2].clamp(-1.0, 1.0));
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    Ok(match m {
        0 => norm * p,
        m if m > 0 => 2f64.sqrt() * norm * p * (am as f64 * phi).cos(),
        _ => 2f64.sqrt() * norm * p * (am as f64 * phi).sin(),
    })
}
