//! Energy ledger, PDE residual and the Sobolev/Bourgain norms.
//!
//! L² quantities are over `[0, 2pi] x [0, pi]`. With the stored
//! convention `u = sum_{m, n>=1} 2 u_{m,n} e^{imx} cos(ny)`,
//! `||u||^2 = 4 pi^2 sum_{stored} |u_{m,n}|^2`.

mod energy;
mod norms;
mod residual;

pub use energy::{
    coeff_dissipation, coeff_energy, dissipation, energy_balance, l2_energy, EnergyLedger,
};
pub use norms::{hs0b_norm, sobolev_norm, tsb_norm, CoefficientHistory, CutoffSpec};
pub use residual::{pde_residual, pde_residual_physical};

use std::f64::consts::PI;

/// `4 pi^2`: the L² weight of one stored coefficient.
pub(crate) const MODE_WEIGHT: f64 = 4.0 * PI * PI;
