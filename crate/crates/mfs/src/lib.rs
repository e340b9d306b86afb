//! Dirichlet–Laplace eigenvalues of convex bodies given by support
//! functions, by the method of fundamental solutions with the subspace-angle
//! criterion, and the Hadamard densities of simple eigenvalues.

mod body;
mod config;
mod density;
mod discretization;
mod eigenfunction;
mod error;
pub mod kernel;
mod spectrum;

pub use body::{Body, BoundarySample};
pub use config::MfsConfig;
pub use density::{branch_density, eigen_gradient_density, norm_squared, HadamardDensity};
pub use discretization::{Discretization, Modes, MAX_CONDITION};
pub use eigenfunction::Eigenfunction;
pub use error::MfsError;
pub use kernel::{fundamental_gradient, fundamental_solution, hankel0, hankel0_reference};
pub use spectrum::{
    default_bracket, faber_krahn, find_eigenvalues, locate, refine_minimum, scan_grid, weyl_count,
    weyl_eigenvalue, EigenResult, Spectrum, REFINE_WIDTH, WEYL_TOLERANCE,
};

/// `σ₁(λ)` for `body` under `cfg`.
pub fn sigma1(body: &Body, lambda: f64, cfg: &MfsConfig) -> Result<f64, MfsError> {
    Discretization::new(body, cfg)?.sigma1(lambda)
}
