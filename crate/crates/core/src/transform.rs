//! Fourier (x) / cosine (y) transforms and the dealiased nonlinearity.
//!
//! The y-direction uses a type-I cosine transform on `y_j = pi j / N`,
//! realized as an FFT of the even extension of length `2N`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{enforce_symmetry_in_place, PhysicalField, SpectralField};
use crate::params::{GridSpec, ModelParams};

/// Relative tolerance on the per-column y-mean accepted by [`forward_transform`].
pub const MEAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// FFT plans for one `nx x (N + 1)` sample grid.
struct Plans {
    nx: usize,
    npts: usize,
    x_fwd: Arc<dyn Fft<f64>>,
    x_inv: Arc<dyn Fft<f64>>,
    y_fwd: Arc<dyn Fft<f64>>,
    y_inv: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(planner: &mut FftPlanner<f64>, nx: usize, ny: usize) -> Self {
        Self {
            nx,
            npts: ny,
            x_fwd: planner.plan_fft_forward(nx),
            x_inv: planner.plan_fft_inverse(nx),
            y_fwd: planner.plan_fft_forward(2 * ny),
            y_inv: planner.plan_fft_inverse(2 * ny),
        }
    }

    /// Samples `values[i * (N+1) + j]` to a table `t[k * (N+1) + n]` with
    /// `k` the FFT-ordered x-mode. `n = 0` holds the y-mean, `1 <= n <= N`
    /// the double-sided coefficient of `cos(n y)`.
    fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        let (nx, ny) = (self.nx, self.npts);
        let stride = ny + 1;
        let mut table = vec![ZERO; nx * stride];
        let mut line = vec![ZERO; nx];
        for j in 0..=ny {
            for i in 0..nx {
                line[i] = Complex64::new(values[i * stride + j], 0.0);
            }
            self.x_fwd.process(&mut line);
            for k in 0..nx {
                table[k * stride + j] = line[k] / nx as f64;
            }
        }
        let mut ext = vec![ZERO; 2 * ny];
        for k in 0..nx {
            let row = &mut table[k * stride..(k + 1) * stride];
            ext[..=ny].copy_from_slice(row);
            for j in 1..ny {
                ext[2 * ny - j] = row[j];
            }
            self.y_fwd.process(&mut ext);
            let scale = 1.0 / (2.0 * ny as f64);
            row[0] = ext[0] * scale;
            for n in 1..ny {
                row[n] = ext[n] * scale;
            }
            row[ny] = ext[ny] * (scale / 2.0);
        }
        table
    }

    /// Inverse of [`Plans::analyze`]; imaginary residue is dropped.
    fn synthesize(&self, mut table: Vec<Complex64>) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.npts);
        let stride = ny + 1;
        let mut ext = vec![ZERO; 2 * ny];
        for k in 0..nx {
            let row = &mut table[k * stride..(k + 1) * stride];
            if row.iter().all(|c| *c == ZERO) {
                continue;
            }
            ext[0] = row[0];
            for n in 1..ny {
                ext[n] = row[n];
                ext[2 * ny - n] = row[n];
            }
            ext[ny] = row[ny] * 2.0;
            self.y_inv.process(&mut ext);
            row.copy_from_slice(&ext[..=ny]);
        }
        let mut values = vec![0.0; nx * stride];
        let mut line = vec![ZERO; nx];
        for j in 0..=ny {
            for k in 0..nx {
                line[k] = table[k * stride + j];
            }
            self.x_inv.process(&mut line);
            for i in 0..nx {
                values[i * stride + j] = line[i].re;
            }
        }
        values
    }
}

/// Transform plans for a [`GridSpec`], on both the base and the padded grid.
pub struct SpectralTransform {
    grid: GridSpec,
    base: Plans,
    padded: Plans,
}

impl SpectralTransform {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let base = Plans::new(&mut planner, grid.nx, grid.ny);
        let padded = Plans::new(&mut planner, grid.padded_nx, grid.padded_ny);
        Self { grid, base, padded }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Forward transform keeping the y-mean profile `C(x_i)` separately.
    pub fn forward_with_mean(&self, f: &PhysicalField) -> Result<(SpectralField, Vec<f64>)> {
        self.check_grid(f.grid)?;
        let g = self.grid;
        let stride = g.ny + 1;
        let table = self.base.analyze(&f.values);
        let mut out = SpectralField::zeros(g, f.time);
        let mut mean_modes = vec![ZERO; g.nx];
        for k in 0..g.nx {
            mean_modes[k] = table[k * stride];
            for n in 1..=g.ny {
                out.coeffs[(n - 1) * g.nx + k] = table[k * stride + n];
            }
        }
        self.base.x_inv.process(&mut mean_modes);
        let mean = mean_modes.iter().map(|c| c.re).collect();
        enforce_symmetry_in_place(&mut out);
        Ok((out, mean))
    }

    /// Projection onto the Fourier-cosine basis. Rejects data whose y-mean
    /// exceeds [`MEAN_TOL`] relative to `max |f|`.
    pub fn forward(&self, f: &PhysicalField) -> Result<SpectralField> {
        let (out, mean) = self.forward_with_mean(f)?;
        let worst = mean.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if worst > MEAN_TOL * f.max_abs().max(1e-300) {
            return Err(Error::MeanMode(format!(
                "max |y-mean| = {worst:.3e} exceeds tolerance"
            )));
        }
        Ok(out)
    }

    /// Reconstruct grid samples. With `params`, the `e^{beta t}` prefactor of
    /// the physical solution is applied; without, the renormalized
    /// coefficient field is returned.
    pub fn inverse(
        &self,
        c: &SpectralField,
        params: Option<&ModelParams>,
    ) -> Result<PhysicalField> {
        self.check_grid(c.grid)?;
        c.check_symmetry()?;
        let g = self.grid;
        let stride = g.ny + 1;
        let mut table = vec![ZERO; g.nx * stride];
        for k in 0..g.nx {
            for n in 1..=g.ny {
                table[k * stride + n] = c.coeffs[(n - 1) * g.nx + k];
            }
        }
        let mut values = self.base.synthesize(table);
        if let Some(p) = params {
            let s = (p.beta() * c.time).exp();
            values.iter_mut().for_each(|v| *v *= s);
        }
        PhysicalField::new(g, values, c.time)
    }

    /// Dealiased `[u^2]_{m,n}` for retained modes (`n != 0` part only).
    pub fn square(&self, c: &SpectralField) -> SpectralField {
        let g = self.grid;
        let (pnx, pny) = (g.padded_nx, g.padded_ny);
        let stride = pny + 1;
        let mut table = vec![ZERO; pnx * stride];
        let half = g.max_m();
        for n in 1..=g.ny {
            for m in -half..=half {
                let k = m.rem_euclid(pnx as i64) as usize;
                table[k * stride + n] = c.coeffs[g.index(m, n as i64).unwrap()];
            }
        }
        let mut values = self.padded.synthesize(table);
        values.iter_mut().for_each(|v| *v *= *v);
        let sq = self.padded.analyze(&values);
        let mut out = SpectralField::zeros(g, c.time);
        for n in 1..=g.ny {
            for m in -half..=half {
                let k = m.rem_euclid(pnx as i64) as usize;
                out.coeffs[g.index(m, n as i64).unwrap()] = sq[k * stride + n];
            }
        }
        out
    }

    /// `A_{m,n} = -i m [u^2]_{m,n}` by the padded pseudospectral route.
    pub fn nonlinear(&self, c: &SpectralField) -> Result<SpectralField> {
        self.check_grid(c.grid)?;
        c.check_symmetry()?;
        Ok(self.nonlinear_unchecked(c))
    }

    pub(crate) fn nonlinear_unchecked(&self, c: &SpectralField) -> SpectralField {
        let g = self.grid;
        if c.is_zero() {
            return SpectralField::zeros(g, c.time);
        }
        let mut out = self.square(c);
        for (idx, v) in out.coeffs.iter_mut().enumerate() {
            let (m, _) = g.mode(idx);
            *v = Complex64::new(0.0, -(m as f64)) * *v;
        }
        enforce_symmetry_in_place(&mut out);
        out
    }

    fn check_grid(&self, g: GridSpec) -> Result<()> {
        if g != self.grid {
            return Err(Error::Shape(format!(
                "field grid {}x{} does not match transform grid {}x{}",
                g.nx, g.ny, self.grid.nx, self.grid.ny
            )));
        }
        Ok(())
    }
}

pub fn forward_transform(f: &PhysicalField) -> Result<SpectralField> {
    SpectralTransform::new(f.grid).forward(f)
}

pub fn inverse_transform(c: &SpectralField, params: Option<&ModelParams>) -> Result<PhysicalField> {
    SpectralTransform::new(c.grid).inverse(c, params)
}

pub fn nonlinear_term(c: &SpectralField) -> Result<SpectralField> {
    SpectralTransform::new(c.grid).nonlinear(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::new(8, 8).unwrap()
    }

    #[test]
    fn cos_y_is_half_at_0_1() {
        let f = PhysicalField::from_fn(grid(), 0.0, |_, y| y.cos());
        let c = forward_transform(&f).unwrap();
        for (idx, v) in c.coeffs.iter().enumerate() {
            let expect = if grid().mode(idx) == (0, 1) { 0.5 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sin_x_cos_2y_is_a_conjugate_pair() {
        let f = PhysicalField::from_fn(grid(), 0.0, |x, y| x.sin() * (2.0 * y).cos());
        let c = forward_transform(&f).unwrap();
        let nonzero: Vec<_> = c
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-14)
            .map(|(i, v)| (grid().mode(i), *v))
            .collect();
        assert_eq!(nonzero.len(), 2);
        // sin x cos 2y = 2 Re(u e^{ix}) cos 2y with u = -i/4.
        assert!((c.get(1, 2) - Complex64::new(0.0, -0.25)).norm() < 1e-15);
        assert_eq!(c.get(-1, 2), c.get(1, 2).conj());
    }

    #[test]
    fn nyquist_y_mode_round_trips() {
        let g = grid();
        let f = PhysicalField::from_fn(g, 0.0, |x, y| (8.0 * y).cos() * (1.0 + x.cos()));
        let c = forward_transform(&f).unwrap();
        assert!((c.get(0, 8).re - 0.5).abs() < 1e-14);
        let back = inverse_transform(&c, None).unwrap();
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_of_half_at_0_1_is_cos_y() {
        let g = grid();
        let c = SpectralField::from_modes(g, &[(0, 1, Complex64::new(0.5, 0.0))], 0.0).unwrap();
        let f = inverse_transform(&c, None).unwrap();
        for i in 0..g.nx {
            for j in 0..=g.ny {
                assert!((f.at(i, j) - g.y(j).cos()).abs() < 1e-15);
            }
        }
        let zero = inverse_transform(&SpectralField::zeros(g, 0.0), None).unwrap();
        assert!(zero.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn beta_prefactor_applied_only_with_params() {
        let g = grid();
        let c = SpectralField::from_modes(g, &[(0, 1, Complex64::new(0.5, 0.0))], 2.0).unwrap();
        let p = ModelParams::new(1.0, 0.25, 1.0).unwrap();
        let f = inverse_transform(&c, Some(&p)).unwrap();
        assert!((f.at(0, 0) - (0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn broken_symmetry_rejected() {
        let g = grid();
        let mut c = SpectralField::zeros(g, 0.0);
        c.coeffs[g.index(1, 1).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            inverse_transform(&c, None),
            Err(Error::Symmetry { .. })
        ));
        assert!(matches!(nonlinear_term(&c), Err(Error::Symmetry { .. })));
    }

    #[test]
    fn mean_rejected() {
        let f = PhysicalField::from_fn(grid(), 0.0, |x, y| y.cos() + 0.1 * x.cos());
        assert!(matches!(forward_transform(&f), Err(Error::MeanMode(_))));
    }

    #[test]
    fn shape_mismatch() {
        let other = GridSpec::new(16, 8).unwrap();
        let f = PhysicalField::from_fn(other, 0.0, |_, y| y.cos());
        assert!(matches!(
            SpectralTransform::new(grid()).forward(&f),
            Err(Error::Shape(_))
        ));
        assert!(PhysicalField::new(grid(), vec![0.0; 3], 0.0).is_err());
    }

    #[test]
    fn x_independent_field_has_no_nonlinearity() {
        let g = grid();
        let c = SpectralField::from_modes(g, &[(0, 1, Complex64::new(0.7, 0.0))], 0.0).unwrap();
        assert!(nonlinear_term(&c).unwrap().max_abs() < 1e-16);
    }

    #[test]
    fn parseval_on_grid() {
        // For a field with n <= ny/2 the trapezoid rule in y is exact for u^2.
        let g = GridSpec::new(8, 16).unwrap();
        let f = PhysicalField::from_fn(g, 0.0, |x, y| {
            (x + 0.3).cos() * y.cos() + 0.5 * (3.0 * y).cos()
                - 0.2 * (2.0 * x).sin() * (4.0 * y).cos()
        });
        let c = forward_transform(&f).unwrap();
        let coeff_sum: f64 = c.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>() * 4.0 * PI * PI;
        let (hx, hy) = (2.0 * PI / g.nx as f64, PI / g.ny as f64);
        let mut quad = 0.0;
        for i in 0..g.nx {
            for j in 0..=g.ny {
                let w = if j == 0 || j == g.ny { 0.5 } else { 1.0 };
                quad += w * f.at(i, j).powi(2) * hx * hy;
            }
        }
        assert!((coeff_sum - quad).abs() < 1e-12 * quad);
    }
}
