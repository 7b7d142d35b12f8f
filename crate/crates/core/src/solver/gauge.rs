use num_complex::Complex64;

use crate::field::PhysicalField;
use crate::transform::SpectralTransform;

/// Galilean gauge for a constant y-mean `C0`:
/// `U(x, y, t) = w(x - 2 C0 t, y, t) + C0`.
///
/// The x-shift is applied spectrally as the phase `e^{-2 i C0 t m}`. A
/// y-mean already present in `f` is carried along unshifted.
pub fn gauge_transform(f: &PhysicalField, c0_mean: f64, t: f64) -> PhysicalField {
    let tr = SpectralTransform::new(f.grid);
    let (mut spec, mean) = tr
        .forward_with_mean(f)
        .expect("a field's own grid always matches its transform");
    for (idx, c) in spec.coeffs.iter_mut().enumerate() {
        let (m, _) = f.grid.mode(idx);
        *c *= Complex64::from_polar(1.0, -2.0 * c0_mean * t * m as f64);
    }
    let mut out = tr
        .inverse(&spec, None)
        .expect("phase rotation preserves the coefficient symmetry");
    let stride = f.grid.ny + 1;
    for (i, row) in out.values.chunks_mut(stride).enumerate() {
        row.iter_mut().for_each(|v| *v += mean[i] + c0_mean);
    }
    out.time = f.time;
    out
}
