//! Named vertex deformations used to build the non-analytic test geometries.
//!
//! * `ellipse`: `(x, y) -> (2x, y)`; applied to a unit disk it gives semi-axes 2 and 1.
//! * `dumbbell`: pinches the cross-section of a ball around `z = 0`,
//!   `(x, y, z) -> (s x, s y, z)` with `s(z) = 1 - 0.6 exp(-(z / 0.35)^2)`, so the
//!   radius is scaled by 0.4 at the equator.
//! * `fish`: stretches a sphere along x to length 4 and tapers it towards
//!   `x = -1`, with a slight upward bend.
//!
//! The exact shapes are illustrative; any injective smooth map works.

use crate::scalar::Real;

/// Boxed vertex map.
pub type VertexMap<T> = Box<dyn Fn([T; 3]) -> [T; 3] + Send + Sync>;

pub const PRESET_NAMES: &[&str] = &["ellipse", "dumbbell", "fish"];

pub fn ellipse<T: Real>() -> VertexMap<T> {
    Box::new(|p| [p[0] * T::of(2.0), p[1], p[2]])
}

pub fn dumbbell<T: Real>() -> VertexMap<T> {
    Box::new(|p| {
        let t = p[2] / T::of(0.35);
        let s = T::one() - T::of(0.6) * (-(t * t)).exp();
        [p[0] * s, p[1] * s, p[2]]
    })
}

pub fn fish<T: Real>() -> VertexMap<T> {
    Box::new(|p| {
        let x = p[0];
        // Taper factor runs from 0.4 at the tail (x = -1) to 1 at the head.
        let taper = T::of(0.7) + T::of(0.3) * x;
        [
            T::of(2.0) * x,
            T::of(0.8) * p[1] * taper,
            T::of(0.5) * p[2] * taper + T::of(0.15) * x * x,
        ]
    })
}

/// Uniform scaling by `s`.
pub fn scale<T: Real>(s: T) -> VertexMap<T> {
    Box::new(move |p| [p[0] * s, p[1] * s, p[2] * s])
}

pub fn by_name<T: Real>(name: &str) -> Option<VertexMap<T>> {
    match name {
        "ellipse" => Some(ellipse()),
        "dumbbell" => Some(dumbbell()),
        "fish" => Some(fish()),
        _ => None,
    }
}
