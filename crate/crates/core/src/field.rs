//! Coefficient-space and physical-space fields.
//!
//! Coefficients follow the double-sided convention
//! `u(x, y) = sum_{m, n != 0} u_{m,n} exp(i m x + i n y)` with
//! `u_{m,-n} = u_{m,n}`, so only `n >= 1` is stored and a stored `u_{m,n}`
//! contributes `2 u_{m,n} exp(i m x) cos(n y)`. In particular `cos(y)` is the
//! single stored pair `u_{0,1} = 1/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::GridSpec;

/// Relative symmetry defect tolerated before [`Error::Symmetry`] is raised.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Coefficients `u_{m,n}(t)` of the renormalized field (no `e^{beta t}`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_coeffs()],
            time,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != grid.n_coeffs() {
            return Err(Error::Shape(format!(
                "{} coefficients for a {}x{} grid",
                coeffs.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { grid, coeffs, time })
    }

    /// Field built from a list of `(m, n, u_{m,n})`; conjugate partners are
    /// filled in so the result is symmetric.
    pub fn from_modes(grid: GridSpec, modes: &[(i64, i64, Complex64)], time: f64) -> Result<Self> {
        let mut f = Self::zeros(grid, time);
        for &(m, n, c) in modes {
            if m.abs() > grid.max_m() {
                return Err(Error::Shape(format!("mode ({m}, {n}) outside the grid")));
            }
            let i = grid
                .index(m, n)
                .ok_or_else(|| Error::Shape(format!("mode ({m}, {n}) outside the grid")))?;
            let j = grid.index(-m, n).expect("mirror of a retained mode");
            if m == 0 {
                f.coeffs[i] = Complex64::new(c.re, 0.0);
            } else {
                f.coeffs[i] = c;
                f.coeffs[j] = c.conj();
            }
        }
        Ok(f)
    }

    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        self.grid
            .index(m, n)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `max |u_{-m,n} - conj(u_{m,n})|`, also counting a non-zero Nyquist slot
    /// and imaginary parts of `m = 0` entries.
    pub fn symmetry_defect(&self) -> f64 {
        let g = self.grid;
        let mut defect: f64 = 0.0;
        for n in 1..=g.ny as i64 {
            defect = defect.max(self.get(-(g.nx as i64) / 2, n).norm());
            for m in 0..=g.max_m() {
                let a = self.get(m, n);
                let b = self.get(-m, n);
                defect = defect.max((b - a.conj()).norm());
            }
        }
        defect
    }

    pub fn check_symmetry(&self) -> Result<()> {
        let defect = self.symmetry_defect();
        if defect > SYMMETRY_TOL * self.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Symmetry { defect });
        }
        Ok(())
    }

    /// Multiply every coefficient by a real scalar.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            time: self.time,
        }
    }
}

/// Project onto the reality-symmetric subspace:
/// `u_{-m,n} <- (u_{-m,n} + conj(u_{m,n})) / 2`, `u_{m,n}` its conjugate,
/// the Nyquist slot cleared. Idempotent, and exact on symmetric input.
pub fn enforce_symmetry(c: &SpectralField) -> SpectralField {
    let mut out = c.clone();
    enforce_symmetry_in_place(&mut out);
    out
}

pub fn enforce_symmetry_in_place(c: &mut SpectralField) {
    let g = c.grid;
    for n in 1..=g.ny as i64 {
        let nyq = g.index(-(g.nx as i64) / 2, n).unwrap();
        c.coeffs[nyq] = Complex64::new(0.0, 0.0);
        let i0 = g.index(0, n).unwrap();
        c.coeffs[i0].im = 0.0;
        for m in 1..=g.max_m() {
            let ip = g.index(m, n).unwrap();
            let im = g.index(-m, n).unwrap();
            let avg = (c.coeffs[im] + c.coeffs[ip].conj()) / 2.0;
            c.coeffs[im] = avg;
            c.coeffs[ip] = avg.conj();
        }
    }
}

/// Samples `u(x_i, y_j)` on the `nx x (ny + 1)` grid, stored `i * (ny + 1) + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_samples() {
            return Err(Error::Shape(format!(
                "{} samples for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny + 1
            )));
        }
        Ok(Self { grid, values, time })
    }

    /// Sample an analytic function on the grid.
    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_samples());
        for i in 0..grid.nx {
            for j in 0..=grid.ny {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid, values, time }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.grid.ny + 1) + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projection_arithmetic() {
        let g = GridSpec::new(8, 8).unwrap();
        let mut f = SpectralField::zeros(g, 0.0);
        f.coeffs[g.index(1, 1).unwrap()] = c(1.0, 1.0);
        let p = enforce_symmetry(&f);
        assert_eq!(p.get(1, 1), c(0.5, 0.5));
        assert_eq!(p.get(-1, 1), c(0.5, -0.5));
        assert_eq!(p.symmetry_defect(), 0.0);
    }

    #[test]
    fn symmetric_input_is_untouched() {
        let g = GridSpec::new(8, 8).unwrap();
        let f = SpectralField::from_modes(
            g,
            &[
                (1, 1, c(0.3, -0.7)),
                (0, 2, c(0.1, 0.0)),
                (3, 8, c(-1e-3, 2e-3)),
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(enforce_symmetry(&f), f);
        assert!(f.check_symmetry().is_ok());
    }

    #[test]
    fn broken_symmetry_detected() {
        let g = GridSpec::new(8, 8).unwrap();
        let mut f = SpectralField::from_modes(g, &[(1, 1, c(1.0, 0.5))], 0.0).unwrap();
        f.coeffs[g.index(-1, 1).unwrap()] = c(0.2, 0.0);
        assert!(matches!(f.check_symmetry(), Err(Error::Symmetry { .. })));
    }

    #[test]
    fn nyquist_cleared() {
        let g = GridSpec::new(8, 8).unwrap();
        let mut f = SpectralField::zeros(g, 0.0);
        f.coeffs[g.index(-4, 3).unwrap()] = c(1.0, 0.0);
        assert!(f.check_symmetry().is_err());
        assert!(enforce_symmetry(&f).is_zero());
    }
}
