//! Duhamel-form time integration.
//!
//! The renormalized coefficients `v_{m,n}(t)` (physical field
//! `u = e^{beta t} sum v_{m,n} e^{imx+iny}`) obey
//!
//! ```text
//! v(t) = e^{lambda (t - t0)} v(t0) + int_{t0}^{t} e^{lambda (t - s)} e^{beta s} A(v(s)) ds,
//! lambda_{m,n} = -alpha n^2 + i gamma m^3 / n^2,
//! ```
//!
//! which is iterated to its fixed point on short windows `[t0, t0 + delta]`
//! and the windows are chained.

mod gauge;
mod oracle;
mod phi;
mod picard;

pub use gauge::gauge_transform;
pub use oracle::oracle_step;
pub use phi::{phi1, phi2};
pub use picard::{picard_window, picard_window_with, solve, Forcing};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::params::{GridSpec, ModelParams};

/// Window and fixed-point settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Window length `delta`.
    pub window: f64,
    /// Quadrature nodes per window, endpoints included.
    pub nodes_per_window: usize,
    /// Absolute tolerance on `sup |v^{(j+1)} - v^{(j)}|` over modes and nodes.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Halve the window (at most [`MAX_HALVINGS`] times) when the iteration
    /// fails to contract.
    pub adapt_window: bool,
    /// Keep interior window nodes in the trajectory, not only window ends.
    pub record_interior: bool,
}

/// Cap on window halvings.
pub const MAX_HALVINGS: usize = 20;

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            window: 1e-2,
            nodes_per_window: 5,
            picard_tol: 1e-13,
            picard_max_iter: 50,
            adapt_window: true,
            record_interior: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0) || !self.window.is_finite() {
            return Err(Error::InvalidParams(format!(
                "window = {} must be > 0",
                self.window
            )));
        }
        if self.nodes_per_window < 2 {
            return Err(Error::InvalidParams("nodes_per_window must be >= 2".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidParams("picard_tol must be > 0".into()));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::InvalidParams("picard_max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one fixed-point solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub iterations: usize,
    /// `sup |v^{(j+1)} - v^{(j)}|` per iteration, floored at the smallest
    /// positive normal so it stays strictly positive.
    pub residual_history: Vec<f64>,
    /// Geometric mean of successive residual ratios above the round-off floor.
    pub contraction_ratio: f64,
    /// Window length actually used.
    pub window: f64,
    pub halvings: usize,
    pub converged: bool,
}

/// Per-window record kept by [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowLog {
    pub t_start: f64,
    pub window: f64,
    pub iterations: usize,
    pub residual: f64,
    pub contraction_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<SpectralField>,
    pub params: ModelParams,
    pub config: SolverConfig,
    pub contraction_log: Vec<WindowLog>,
}

impl Trajectory {
    pub fn grid(&self) -> GridSpec {
        self.snapshots[0].grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory is never empty")
    }
}

/// `lambda_{m,n} = -alpha n^2 + i l_{m,n}` for every stored slot.
pub(crate) fn linear_rates(grid: GridSpec, p: &ModelParams) -> Vec<Complex64> {
    (0..grid.n_coeffs())
        .map(|idx| {
            let (m, n) = grid.mode(idx);
            Complex64::new(-p.alpha() * (n * n) as f64, p.symbol(m, n))
        })
        .collect()
}

/// Exact linear flow: `v_{m,n} <- exp((-alpha n^2 + i l_{m,n}) dt) v_{m,n}`.
pub fn linear_propagate(c: &SpectralField, dt: f64, p: &ModelParams) -> Result<SpectralField> {
    if dt < 0.0 || dt.is_nan() {
        return Err(Error::BackwardTime(dt));
    }
    let rates = linear_rates(c.grid, p);
    let coeffs = c
        .coeffs
        .iter()
        .zip(&rates)
        .map(|(v, r)| if dt == 0.0 { *v } else { (r * dt).exp() * v })
        .collect();
    Ok(SpectralField {
        grid: c.grid,
        coeffs,
        time: c.time + dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_step_is_identity() {
        let g = GridSpec::new(8, 8).unwrap();
        let p = ModelParams::new(1.0, 0.3, 2.0).unwrap();
        let c = SpectralField::from_modes(g, &[(2, 3, Complex64::new(0.1, -0.4))], 0.5).unwrap();
        assert_eq!(linear_propagate(&c, 0.0, &p).unwrap(), c);
    }

    #[test]
    fn single_mode_decays_without_phase() {
        let g = GridSpec::new(8, 8).unwrap();
        let p = ModelParams::new(1.0, 0.0, 1.0).unwrap();
        let c = SpectralField::from_modes(g, &[(0, 1, Complex64::new(0.5, 0.0))], 0.0).unwrap();
        let out = linear_propagate(&c, 1.0, &p).unwrap();
        assert!((out.get(0, 1) - Complex64::new(0.5 * (-1.0f64).exp(), 0.0)).norm() < 1e-16);
        assert_eq!(out.time, 1.0);
    }

    #[test]
    fn modulus_law() {
        let g = GridSpec::new(16, 8).unwrap();
        let p = ModelParams::new(0.7, 0.0, -1.3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let modes: Vec<_> = (0..20)
            .map(|_| {
                (
                    rng.gen_range(-7..=7),
                    rng.gen_range(1..=8),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        let c = SpectralField::from_modes(g, &modes, 0.0).unwrap();
        let dt = 0.037;
        let out = linear_propagate(&c, dt, &p).unwrap();
        for idx in 0..g.n_coeffs() {
            let (_, n) = g.mode(idx);
            let expect = c.coeffs[idx].norm() * (-p.alpha() * (n * n) as f64 * dt).exp();
            assert!((out.coeffs[idx].norm() - expect).abs() <= 1e-15 * (1.0 + expect));
            if c.coeffs[idx].norm() > 0.0 {
                assert!(out.coeffs[idx].norm() < c.coeffs[idx].norm());
            }
        }
    }

    #[test]
    fn backward_time_rejected() {
        let g = GridSpec::new(8, 8).unwrap();
        let p = ModelParams::new(1.0, 0.0, 1.0).unwrap();
        let c = SpectralField::zeros(g, 0.0);
        assert!(matches!(
            linear_propagate(&c, -1e-3, &p),
            Err(Error::BackwardTime(_))
        ));
    }
}
