//! Coefficient spaces shared by 2D and 3D code paths.

use crate::fourier;
use crate::harmonics::{sph_len, sph_lm, HarmonicSample};
use crate::sphere::SpherePoint;

/// Truncated basis in which a support function is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Fourier series of order `N` (`2N + 1` coefficients).
    Planar { order: usize },
    /// Real spherical harmonics up to degree `N` (`(N + 1)²` coefficients).
    Spherical { degree: usize },
}

/// A unit direction in the plane (by angle) or in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Angle(f64),
    Unit([f64; 3]),
}

impl Direction {
    pub fn opposite(&self) -> Direction {
        match *self {
            Direction::Angle(t) => Direction::Angle(t + std::f64::consts::PI),
            Direction::Unit(u) => Direction::Unit([-u[0], -u[1], -u[2]]),
        }
    }
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Planar { .. } => 2,
            Space::Spherical { .. } => 3,
        }
    }

    /// Highest Fourier index or harmonic degree.
    pub fn truncation(&self) -> usize {
        match *self {
            Space::Planar { order } => order,
            Space::Spherical { degree } => degree,
        }
    }

    pub fn coeff_len(&self) -> usize {
        match *self {
            Space::Planar { order } => fourier::coeff_len(order),
            Space::Spherical { degree } => sph_len(degree),
        }
    }

    /// Fourier frequency or harmonic degree of each flat coefficient.
    pub fn degree_of(&self, idx: usize) -> usize {
        match *self {
            Space::Planar { order } => fourier::frequency_of(order, idx),
            Space::Spherical { .. } => sph_lm(idx).0,
        }
    }

    /// Values of every basis function in the given direction.
    ///
    /// Panics if the direction kind does not match the space dimension.
    pub fn basis_at(&self, dir: Direction) -> Vec<f64> {
        match (*self, dir) {
            (Space::Planar { order }, Direction::Angle(theta)) => fourier::basis_row(order, theta, 0),
            (Space::Spherical { degree }, Direction::Unit(u)) => {
                let p = SpherePoint::from_vector(u);
                HarmonicSample::new(degree, p.phi, p.psi).y
            }
            (space, dir) => panic!("direction {dir:?} does not belong to {space:?}"),
        }
    }

    /// Support value `p(u)` of a flat coefficient vector.
    pub fn support_value(&self, coeffs: &[f64], dir: Direction) -> f64 {
        self.basis_at(dir).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }

    /// Flat index of the constant coefficient (always 0) and the value it
    /// takes for a ball of radius `r`.
    pub fn constant_for_radius(&self, r: f64) -> f64 {
        match self {
            Space::Planar { .. } => r,
            Space::Spherical { .. } => r * (4.0 * std::f64::consts::PI).sqrt(),
        }
    }
}
