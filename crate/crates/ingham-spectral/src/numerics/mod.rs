//! Grids, quadrature, an adaptive ODE integrator and finite-difference operators.

pub mod fd;
pub mod gauss;
mod grid;
pub mod ode;
pub mod profiles;

pub use fd::{apply_operator_fd, eigen_residual, ode_residual, EigenCheck, OpKind};
pub use grid::{integrate, make_grid, RadialGrid, SampledRadialFunction, Scheme, SpectralSamples, WeightKind};
pub use ode::{jacobi_ivp, ode_solve_ivp, OdeSolution};
