//! Containers given by outward unit face normals and offsets.

use std::f64::consts::PI;

use crate::error::{Result, ShapeError};
use crate::space::Direction;

/// `{x : n_j · x <= h_j}` centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub normals: Vec<Direction>,
    pub offsets: Vec<f64>,
}

impl Polytope {
    pub fn new(normals: Vec<Direction>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() || normals.is_empty() {
            return Err(ShapeError::InvalidArgument(format!(
                "polytope needs matching non-empty normals/offsets ({} vs {})",
                normals.len(),
                offsets.len()
            )));
        }
        let dim = dim_of(&normals[0]);
        if normals.iter().any(|n| dim_of(n) != dim) {
            return Err(ShapeError::InvalidArgument("mixed 2D/3D face normals".into()));
        }
        Ok(Self { normals, offsets })
    }

    fn regular(normals: Vec<Direction>, inradius: f64) -> Self {
        let offsets = vec![inradius; normals.len()];
        Self { normals, offsets }
    }

    /// Regular `n`-gon with one face normal along `θ = 0`.
    pub fn regular_polygon(n: usize, inradius: f64) -> Self {
        let normals = (0..n).map(|j| Direction::Angle(2.0 * PI * j as f64 / n as f64)).collect();
        Self::regular(normals, inradius)
    }

    /// Axis-aligned square of side `side`.
    pub fn square(side: f64) -> Self {
        Self::regular_polygon(4, side / 2.0)
    }

    pub fn tetrahedron(inradius: f64) -> Self {
        let s = 1.0 / 3f64.sqrt();
        let normals = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        Self::regular(normals.into_iter().map(Direction::Unit).collect(), inradius)
    }

    pub fn cube(inradius: f64) -> Self {
        let mut normals = Vec::with_capacity(6);
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut n = [0.0; 3];
                n[axis] = sign;
                normals.push(Direction::Unit(n));
            }
        }
        Self::regular(normals, inradius)
    }

    pub fn octahedron(inradius: f64) -> Self {
        let s = 1.0 / 3f64.sqrt();
        let mut normals = Vec::with_capacity(8);
        for a in [s, -s] {
            for b in [s, -s] {
                for c in [s, -s] {
                    normals.push(Direction::Unit([a, b, c]));
                }
            }
        }
        Self::regular(normals, inradius)
    }

    /// Face normals are the icosahedron vertices `(0, ±1, ±φ)` and cyclic shifts.
    pub fn dodecahedron(inradius: f64) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let r = (1.0 + phi * phi).sqrt();
        let mut normals = Vec::with_capacity(12);
        for a in [1.0, -1.0] {
            for b in [phi, -phi] {
                let v = [0.0, a / r, b / r];
                for shift in 0..3 {
                    normals.push(Direction::Unit([v[shift % 3], v[(shift + 1) % 3], v[(shift + 2) % 3]]));
                }
            }
        }
        Self::regular(normals, inradius)
    }

    pub fn dim(&self) -> usize {
        dim_of(&self.normals[0])
    }

    /// Largest `n_j · x - h_j` (<= 0 inside).
    pub fn excess(&self, x: &[f64]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, h)| {
                let d = match *n {
                    Direction::Angle(t) => t.cos() * x[0] + t.sin() * x[1],
                    Direction::Unit(u) => u[0] * x[0] + u[1] * x[1] + u[2] * x[2],
                };
                d - h
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn dim_of(d: &Direction) -> usize {
    match d {
        Direction::Angle(_) => 2,
        Direction::Unit(_) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn platonic_normals_are_unit_and_balanced() {
        for p in [Polytope::tetrahedron(1.0), Polytope::cube(1.0), Polytope::octahedron(1.0), Polytope::dodecahedron(1.0)] {
            let mut sum = [0.0; 3];
            for n in &p.normals {
                let Direction::Unit(u) = *n else { panic!() };
                assert!(((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt() - 1.0).abs() < 1e-15);
                (0..3).for_each(|i| sum[i] += u[i]);
            }
            assert!(sum.iter().all(|s| s.abs() < 1e-14));
        }
        assert_eq!(Polytope::dodecahedron(1.0).normals.len(), 12);
    }

    #[test]
    fn square_excess() {
        let sq = Polytope::square(1.0);
        assert!(sq.excess(&[0.0, 0.0]) + 0.5 < 1e-15);
        assert!((sq.excess(&[0.7, 0.2]) - 0.2).abs() < 1e-15);
        assert!(Polytope::new(vec![Direction::Angle(0.0)], vec![]).is_err());
    }
}
