//! Finite-element tools for locating and isolating Turing-pattern eigenmodes
//! of reaction-diffusion systems on planar domains, surfaces and volumes.

pub mod eigen;
pub mod error;
pub mod fem;
pub mod isolation;
pub mod kinetics;
pub mod linalg;
pub mod mesh;
pub mod pattern;
pub mod reference;
pub mod scalar;
pub mod simulator;
pub mod sparse;

pub use eigen::{dense_generalized_eig, smallest_eigenpairs, EigenOptions, Spectrum};
pub use error::{Error, Result};
pub use fem::{assemble_mass, assemble_stiffness, interpolate, m_inner, m_norm, NodalField};
pub use mesh::{Mesh, MeshKind};
pub use scalar::Real;
pub use sparse::CsrMatrix;

pub type Mesh64 = Mesh<f64>;
pub type Mesh32 = Mesh<f32>;
pub type CsrMatrix64 = CsrMatrix<f64>;
pub type CsrMatrix32 = CsrMatrix<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type NodalField64 = NodalField<f64>;
