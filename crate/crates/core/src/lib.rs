//! Spectral engine for point-scatterer experiments on the round spheres
//! `S^2` and `S^3`.
//!
//! The crate builds eigenfunction data of the sphere Laplacian around a
//! finite scatterer set: zonal harmonics and their interpolation matrices,
//! truncated Green's-function eigenvectors parametrized by a semiclassical
//! energy and a coefficient vector, banded position/momentum observables in
//! the zonal basis, analytic integrators for geodesic flow-out measures, and
//! highest-weight beams concentrating on closed geodesics.

pub mod error;
pub mod geometry;
pub mod greens;
pub mod oldfun;
pub mod quad;
pub mod rng;
pub mod semiclassics;
pub mod specfun;
pub mod zonal;

pub use error::{Error, Result};
pub use geometry::{Point, SphereContext};
