//! Pseudospectral simulation and numerical verification for the 2+1
//! diffusive-dispersive Hall river-braiding equation
//!
//! ```text
//! u_yyt - gamma u_xxx - alpha u_yyyy - beta u_yy + (u^2)_xyy = 0
//! ```
//!
//! on `[0, 2pi] x [0, pi]`, periodic in `x`, with `u_y = u_yyy = 0` at the
//! walls.
//!
//! * [`transform`]: Fourier-cosine transforms and the dealiased nonlinearity.
//! * [`solver`]: Duhamel/Picard windows with exponential quadrature weights,
//!   plus an integrating-factor RK4 oracle.
//! * [`diagnostics`]: energy ledger, PDE residual, Sobolev and Bourgain norms.
//! * [`kernel`]: resonance function, lattice partitions and the bilinear
//!   kernel sum with its sup-scan, plus appendix inequality checks.

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod kernel;
pub mod params;
pub mod quadrature;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use field::{enforce_symmetry, PhysicalField, SpectralField};
pub use params::{dispersion_symbol, GridSpec, ModelParams};
pub use transform::{forward_transform, inverse_transform, nonlinear_term, SpectralTransform};
