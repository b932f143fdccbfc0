//! Numerical building blocks: ODE integration with dense output, adaptive
//! quadrature, finite-difference stencils and scalar root finding.

pub mod diff;
pub mod hermite;
pub mod ode;
pub mod quad;
pub mod roots;

pub use hermite::QuinticHermite;
pub use ode::{dormand_prince, OdeOptions, OdeTrajectory};
pub use quad::{gauss_kronrod, gauss_kronrod_with_breaks, QuadOptions};
