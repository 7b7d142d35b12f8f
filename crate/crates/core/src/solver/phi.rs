use num_complex::Complex64;

const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 24;

/// `phi1(z) = (e^z - 1) / z`, with a Taylor branch near the origin.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 1)
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `phi2(z) = (e^z - 1 - z) / z^2`.
pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 2)
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// `sum_k z^k / (k + shift)!`, Horner form.
fn series(z: Complex64, shift: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (0..SERIES_TERMS).rev() {
        acc = acc * z / (k + shift + 1) as f64 + 1.0;
    }
    let mut fact = 1.0;
    for j in 2..=shift {
        fact *= j as f64;
    }
    acc / fact
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_the_switch() {
        for &(re, im) in &[(0.99, 0.0), (-0.6, 0.79), (0.0, -0.999), (-0.7, -0.7)] {
            let z = Complex64::new(re, im);
            let direct1 = (z.exp() - 1.0) / z;
            let direct2 = (z.exp() - 1.0 - z) / (z * z);
            assert!((series(z, 1) - direct1).norm() < 1e-14);
            assert!((series(z, 2) - direct2).norm() < 1e-14);
        }
    }

    #[test]
    fn limits() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(phi1(z), Complex64::new(1.0, 0.0));
        assert_eq!(phi2(z), Complex64::new(0.5, 0.0));
        // stiff decay
        let z = Complex64::new(-1e4, 3.0);
        assert!((phi1(z) - (-1.0 / z)).norm() < 1e-12);
    }
}
