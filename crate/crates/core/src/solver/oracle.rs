use num_complex::Complex64;

use super::linear_rates;
use crate::error::{Error, Result};
use crate::field::{enforce_symmetry_in_place, SpectralField};
use crate::params::ModelParams;
use crate::transform::SpectralTransform;

/// Independent reference integrator: integrating-factor RK4 (Lawson form)
/// with `substeps` equal steps over `dt`.
///
/// Refuses steps with `alpha * ny^2 * (dt / substeps) > 1`.
pub fn oracle_step(
    c: &SpectralField,
    dt: f64,
    params: &ModelParams,
    substeps: usize,
) -> Result<SpectralField> {
    if dt < 0.0 || dt.is_nan() {
        return Err(Error::BackwardTime(dt));
    }
    if substeps == 0 {
        return Err(Error::InvalidParams("substeps must be >= 1".into()));
    }
    c.check_symmetry()?;
    let g = c.grid;
    let k = dt / substeps as f64;
    let stiffness = params.alpha() * (g.ny * g.ny) as f64 * k;
    if stiffness > 1.0 {
        return Err(Error::Stiffness(stiffness));
    }
    let tr = SpectralTransform::new(g);
    let rates = linear_rates(g, params);
    let half: Vec<Complex64> = rates.iter().map(|r| (r * (0.5 * k)).exp()).collect();
    let full: Vec<Complex64> = half.iter().map(|e| e * e).collect();
    let beta = params.beta();
    let rhs = |v: &SpectralField, t: f64| -> Vec<Complex64> {
        let s = (beta * t).exp();
        tr.nonlinear_unchecked(v)
            .coeffs
            .into_iter()
            .map(|a| a * s)
            .collect()
    };
    let with = |t: f64, f: &dyn Fn(usize) -> Complex64| {
        let mut out = SpectralField {
            grid: g,
            coeffs: (0..g.n_coeffs()).map(f).collect(),
            time: t,
        };
        enforce_symmetry_in_place(&mut out);
        out
    };

    let mut v = c.clone();
    for step in 0..substeps {
        let t = c.time + step as f64 * k;
        let a = rhs(&v, t);
        let va = with(t + 0.5 * k, &|i| half[i] * (v.coeffs[i] + 0.5 * k * a[i]));
        let b = rhs(&va, t + 0.5 * k);
        let vb = with(t + 0.5 * k, &|i| half[i] * v.coeffs[i] + 0.5 * k * b[i]);
        let cc = rhs(&vb, t + 0.5 * k);
        let vc = with(t + k, &|i| full[i] * v.coeffs[i] + k * half[i] * cc[i]);
        let d = rhs(&vc, t + k);
        v = with(t + k, &|i| {
            full[i] * v.coeffs[i]
                + k / 6.0 * (full[i] * a[i] + 2.0 * half[i] * (b[i] + cc[i]) + d[i])
        });
    }
    v.time = c.time + dt;
    Ok(v)
}
