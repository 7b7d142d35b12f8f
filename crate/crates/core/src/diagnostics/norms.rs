use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::kernel::{rho, WeightSpec};
use crate::params::{GridSpec, ModelParams};

/// `||v||_{H^s_{0,b}} = (sum |n|^{4b-2} (|n|+|m|)^{2s} |v_{m,n}|^2)^{1/2}`
/// over the full lattice: every stored `(m, n)` also stands for its
/// mirror `(m, -n)`, so each stored entry counts twice.
pub fn hs0b_norm(c: &SpectralField, s: f64, b: f64) -> f64 {
    let g = c.grid;
    let sum: f64 = c
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(idx, v)| {
            let (m, n) = g.mode(idx);
            let nf = n as f64;
            2.0 * nf.powf(4.0 * b - 2.0) * rho(m, n, s) * v.norm_sqr()
        })
        .sum();
    sum.sqrt()
}

/// `(sum (|n|+|m|)^{2s} |v_{m,n}|^2)^{1/2}` with the same mirror count.
pub fn sobolev_norm(c: &SpectralField, s: f64) -> f64 {
    let g = c.grid;
    let sum: f64 = c
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let (m, n) = g.mode(idx);
            2.0 * rho(m, n, s) * v.norm_sqr()
        })
        .sum();
    sum.sqrt()
}

/// Smooth time cutoff: `phi = 1` on `[-delta, delta]`, `phi = 0` outside
/// `(-2 delta, 2 delta)`, with the `C^inf` step
/// `S(x) = psi(x) / (psi(x) + psi(1 - x))`, `psi(x) = e^{-1/x}`, on the flanks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub delta: f64,
    pub sample_count: usize,
}

impl CutoffSpec {
    pub fn new(delta: f64, sample_count: usize) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "cutoff delta = {delta} must be > 0"
            )));
        }
        if sample_count < 8 {
            return Err(Error::InvalidParams(
                "cutoff needs at least 8 samples".into(),
            ));
        }
        Ok(Self {
            delta,
            sample_count,
        })
    }

    pub fn phi(&self, t: f64) -> f64 {
        smooth_step(2.0 - t.abs() / self.delta)
    }

    /// Uniform sample times `-2 delta + j h`, `h = 4 delta / sample_count`.
    pub fn sample_times(&self) -> Vec<f64> {
        let h = 4.0 * self.delta / self.sample_count as f64;
        (0..self.sample_count)
            .map(|j| -2.0 * self.delta + j as f64 * h)
            .collect()
    }
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = psi(x);
        a / (a + psi(1.0 - x))
    }
}

/// Uniformly sampled coefficient histories `theta_{m,n}(t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientHistory {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    /// One stored-layout coefficient vector per sample time.
    pub samples: Vec<Vec<Complex64>>,
}

impl CoefficientHistory {
    /// Samples `f(t)` at the cutoff's sample times.
    pub fn from_fn(grid: GridSpec, cutoff: &CutoffSpec, f: impl Fn(f64) -> SpectralField) -> Self {
        let times = cutoff.sample_times();
        let samples = times.iter().map(|&t| f(t).coeffs).collect();
        Self {
            grid,
            times,
            samples,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            times: self.times.clone(),
            samples: self
                .samples
                .iter()
                .map(|v| v.iter().map(|c| c * s).collect())
                .collect(),
        }
    }
}

/// Zero-padding factor for the time transform.
const PAD: usize = 4;
/// Integrand values below this fraction of the peak are dropped.
const DROP: f64 = 1e-12;
/// Fraction of the integral tolerated in the outermost 10% of frequencies.
const LEAKAGE: f64 = 1e-6;

/// `||theta||_{s,b} = (sum_{m,n} int W_{m,n}(tau; b) |F[theta_{m,n}](tau)|^2 dtau)^{1/2}`
/// with `F[M](tau) = int e^{-i tau t} M(t) dt`, by a zero-padded
/// DFT of the samples (`theta` should already carry the cutoff and vanish
/// at both ends of the window).
pub fn tsb_norm(
    theta: &CoefficientHistory,
    spec: &WeightSpec,
    cutoff: &CutoffSpec,
    p: &ModelParams,
) -> Result<f64> {
    let nt = theta.times.len();
    if nt < 8 || theta.samples.len() != nt {
        return Err(Error::Resolution(format!("{nt} samples are too few")));
    }
    let h = (theta.times[nt - 1] - theta.times[0]) / (nt - 1) as f64;
    for w in theta.times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::Spacing("coefficient history is not uniform".into()));
        }
    }
    if theta.times[0] < -2.0 * cutoff.delta * (1.0 + 1e-12)
        || theta.times[nt - 1] > 2.0 * cutoff.delta * (1.0 + 1e-12)
    {
        return Err(Error::Resolution(
            "samples extend beyond (-2 delta, 2 delta)".into(),
        ));
    }
    let len = PAD * nt;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let dtau = 2.0 * PI / (len as f64 * h);
    let g = theta.grid;
    let mut total = 0.0;
    let mut outer = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for idx in 0..g.n_coeffs() {
        if theta.samples.iter().all(|v| v[idx].norm_sqr() == 0.0) {
            continue;
        }
        let (m, n) = g.mode(idx);
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (j, v) in theta.samples.iter().enumerate() {
            buf[j] = v[idx];
        }
        fft.process(&mut buf);
        let integrand: Vec<(usize, f64)> = (0..len)
            .map(|k| {
                let kk = if k <= len / 2 {
                    k as f64
                } else {
                    k as f64 - len as f64
                };
                let tau = kk * dtau;
                let f = buf[k] * h;
                (k, spec.weight_b(m, n, tau, p) * f.norm_sqr())
            })
            .collect();
        let peak = integrand.iter().map(|(_, v)| *v).fold(0.0, f64::max);
        for (k, v) in integrand {
            if v < DROP * peak {
                continue;
            }
            let kk = if k <= len / 2 { k } else { len - k };
            let contrib = 2.0 * v * dtau;
            total += contrib;
            if kk as f64 > 0.9 * (len / 2) as f64 {
                outer += contrib;
            }
        }
    }
    if total > 0.0 && outer > LEAKAGE * total {
        return Err(Error::Resolution(format!(
            "{:.3e} of the norm sits in the outer frequency band",
            outer / total
        )));
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        let c = CutoffSpec::new(0.5, 64).unwrap();
        assert_eq!(c.phi(0.5), 1.0);
        assert_eq!(c.phi(-0.5), 1.0);
        assert_eq!(c.phi(1.0), 0.0);
        assert_eq!(c.phi(-1.0), 0.0);
        let mut last = 1.0;
        for k in 0..=100 {
            let t = 0.5 + 0.005 * k as f64;
            let v = c.phi(t);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= last);
            last = v;
        }
        assert!((c.phi(0.75) - 0.5).abs() < 1e-15);
    }
}
