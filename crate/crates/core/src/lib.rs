//! Convex bodies described by truncated spectral expansions of their support
//! function, with the geometric functionals and constraint systems used to
//! optimize over them.

pub mod constraints;
pub mod error;
pub mod fourier;
pub mod functionals;
pub mod harmonics;
pub mod legendre;
pub mod polytope;
pub mod space;
pub mod sphere;
pub mod sum;

pub use error::{Result, ShapeError};
pub use fourier::FourierSupport2D;
pub use harmonics::{HarmonicGrid, SphDeriv, SphericalSupport3D};
pub use space::{Direction, Space};
pub use sphere::{make_sphere_grid, SphereGrid, SpherePoint, DEFAULT_POLE_MARGIN};
pub use polytope::Polytope;

#[cfg(test)]
use openblas_src as _;
