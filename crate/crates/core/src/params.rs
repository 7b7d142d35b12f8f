//! Grid and model parameters.

use crate::error::{Error, Result};

/// Discretization of the strip `[0, 2pi] x [0, pi]`.
///
/// Retained x-modes are `|m| <= nx/2 - 1` (the `m = -nx/2` Nyquist slot is
/// stored but always zero). Retained y-modes are the cosine frequencies
/// `1 <= n <= ny`. Physical samples live on `nx` uniform x-points and on the
/// `ny + 1` point grid `y_j = pi j / ny`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub padded_nx: usize,
    pub padded_ny: usize,
}

impl GridSpec {
    /// Grid with the smallest alias-free padding for a quadratic product.
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        Self::with_padding(nx, ny, 3 * nx / 2, 3 * ny / 2 + 1)
    }

    pub fn with_padding(nx: usize, ny: usize, padded_nx: usize, padded_ny: usize) -> Result<Self> {
        if nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Shape(format!(
                "nx = {nx}, ny = {ny}: both must be even and at least 4"
            )));
        }
        // The cosine grid carries mode ny exactly, so products up to 2 ny
        // fold back onto ny unless padded_ny exceeds 3 ny / 2.
        if 2 * padded_nx < 3 * nx || 2 * padded_ny <= 3 * ny {
            return Err(Error::Shape(format!(
                "padding ({padded_nx}, {padded_ny}) too small for ({nx}, {ny}): \
                 need padded_nx >= 3nx/2 and padded_ny > 3ny/2"
            )));
        }
        Ok(Self {
            nx,
            ny,
            padded_nx,
            padded_ny,
        })
    }

    /// Largest retained `|m|`.
    pub fn max_m(&self) -> i64 {
        self.nx as i64 / 2 - 1
    }

    /// Number of stored coefficients (`nx * ny`).
    pub fn n_coeffs(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of physical samples (`nx * (ny + 1)`).
    pub fn n_samples(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    /// Storage slot of mode `(m, n)`; `m` in FFT order, `n` from 1.
    pub fn index(&self, m: i64, n: i64) -> Option<usize> {
        let half = self.nx as i64 / 2;
        if m < -half || m >= half || n < 1 || n > self.ny as i64 {
            return None;
        }
        let k = m.rem_euclid(self.nx as i64) as usize;
        Some((n as usize - 1) * self.nx + k)
    }

    /// Inverse of [`GridSpec::index`].
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let k = (idx % self.nx) as i64;
        let n = (idx / self.nx) as i64 + 1;
        let m = if k < self.nx as i64 / 2 {
            k
        } else {
            k - self.nx as i64
        };
        (m, n)
    }

    pub fn x(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * i as f64 / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        std::f64::consts::PI * j as f64 / self.ny as f64
    }
}

/// Physical parameters `(alpha, beta, gamma)` of the Hall equation
/// `u_yyt - gamma u_xxx - alpha u_yyyy - beta u_yy + (u^2)_xyy = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha = {alpha} must be > 0")));
        }
        if gamma == 0.0 || !gamma.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} must be finite and non-zero, beta = {beta} finite"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Dispersion symbol `gamma m^3 / n^2`, without the domain check.
    #[inline]
    pub fn symbol(&self, m: i64, n: i64) -> f64 {
        let mf = m as f64;
        let nf = n as f64;
        self.gamma * mf * mf * mf / (nf * nf)
    }
}

/// Dispersion symbol `l_{m,n} = gamma m^3 / n^2`.
pub fn dispersion_symbol(m: i64, n: i64, p: &ModelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dispersion symbol needs n != 0".into()));
    }
    Ok(p.symbol(m, n))
}
