//! Bourgain weights, the resonance function, lattice partitions and the
//! bilinear kernel sum
//!
//! ```text
//! K(m, n, tau) = sum_{(m',n')} int m^2 W_{m,n}(tau; b') dtau1
//!                / ((n^2 + |tau - l_{m,n}|)^2 W_{m',n'}(tau1; b) W_{m-m',n-n'}(tau - tau1; b))
//! ```
//!
//! with `W_{m,n}(tau; b) = rho_{m,n} omega_{m,n}(tau; b)`,
//! `rho_{m,n} = (|n|+|m|)^{2s}` and `omega_{m,n}(tau; b) = (n^2 + |tau - l_{m,n}|)^{2b}`.

mod inner;
mod lemmas;
mod partition;
mod scan;
mod sum;

pub use inner::{two_kink_integral, two_kink_integral_adaptive, InnerMethod, PowerPair};
pub use lemmas::{
    check_appendix_lemmas, lemma_42a_ratio, lemma_42c_ratio, lemma_46_lhs, lemma_46_ratio,
    LemmaGrids, LemmaReport, LemmaRow, LemmaSection,
};
pub use partition::{classify, Partition, PartitionLabel};
pub use scan::{
    sup_scan, tau_probes, tc_gap_constant, KernelReport, ProbeRow, RungReport, ScanConfig,
};
pub use sum::{kernel_sum, kernel_sum_with, summand, Breakdown, KernelSum, Truncation};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Exponents `(s, b, b')` of the weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    s: f64,
    b: f64,
    bprime: f64,
    exploratory: bool,
}

impl WeightSpec {
    /// Enforces `1/2 < b < 2/3`, `b <= b' <= min(2b - 1/2, 2/3)`, `s > 5/2`.
    pub fn new(s: f64, b: f64, bprime: f64) -> Result<Self> {
        let spec = Self::exploratory(s, b, bprime)?;
        if !(b > 0.5 && b < 2.0 / 3.0) {
            return Err(Error::InvalidParams(format!("b = {b} outside (1/2, 2/3)")));
        }
        let upper = (2.0 * b - 0.5).min(2.0 / 3.0);
        if !(bprime >= b && bprime <= upper) {
            return Err(Error::InvalidParams(format!(
                "b' = {bprime} outside [b, min(2b - 1/2, 2/3)] = [{b}, {upper}]"
            )));
        }
        if !(s > 2.5) {
            return Err(Error::InvalidParams(format!("s = {s} must exceed 5/2")));
        }
        Ok(Self {
            exploratory: false,
            ..spec
        })
    }

    /// Skips the exponent window; only `b > 1/2` (needed for the inner
    /// integrals to converge) and finiteness are checked.
    pub fn exploratory(s: f64, b: f64, bprime: f64) -> Result<Self> {
        if !(s.is_finite() && b.is_finite() && bprime.is_finite()) {
            return Err(Error::InvalidParams("exponents must be finite".into()));
        }
        if !(b > 0.5) {
            return Err(Error::InvalidParams(format!("b = {b} must exceed 1/2")));
        }
        if !(s >= 0.0) {
            return Err(Error::InvalidParams(format!("s = {s} must be >= 0")));
        }
        Ok(Self {
            s,
            b,
            bprime,
            exploratory: true,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn bprime(&self) -> f64 {
        self.bprime
    }
    pub fn is_exploratory(&self) -> bool {
        self.exploratory
    }

    /// `b' = b`: admissible for the kernel bound, but the bilinear estimate
    /// in the multiplier space needs `b' > b`, so scans report it apart.
    pub fn is_endpoint(&self) -> bool {
        self.bprime == self.b
    }

    /// `W_{m,n}(tau; b)`; `n` must be nonzero.
    pub fn weight_b(&self, m: i64, n: i64, tau: f64, p: &ModelParams) -> f64 {
        rho(m, n, self.s) * omega(m, n, tau, self.b, p)
    }

    /// `k(n) = min(1/10, |n|^{-2/3 + 2b' - 2b})`.
    pub fn k(&self, n: i64) -> f64 {
        (n.unsigned_abs() as f64)
            .powf(-2.0 / 3.0 + 2.0 * self.bprime - 2.0 * self.b)
            .min(0.1)
    }
}

/// `k1(n) = 1 / (10 |n|)`.
pub fn k1(n: i64) -> f64 {
    1.0 / (10.0 * n.unsigned_abs() as f64)
}

/// Which time exponent a weight uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    B,
    BPrime,
}

/// `rho_{m,n} = (|n| + |m|)^{2s}`.
pub fn rho(m: i64, n: i64, s: f64) -> f64 {
    ((n.unsigned_abs() + m.unsigned_abs()) as f64).powf(2.0 * s)
}

/// `omega_{m,n}(tau; b) = (n^2 + |tau - l_{m,n}|)^{2b}`.
pub fn omega(m: i64, n: i64, tau: f64, b: f64, p: &ModelParams) -> f64 {
    let n2 = (n * n) as f64;
    (n2 + (tau - p.symbol(m, n)).abs()).powf(2.0 * b)
}

/// `W_{m,n}(tau; b or b') = rho_{m,n} omega_{m,n}`.
pub fn weight(
    m: i64,
    n: i64,
    tau: f64,
    spec: &WeightSpec,
    which: Exponent,
    p: &ModelParams,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("weight needs n != 0".into()));
    }
    let b = match which {
        Exponent::B => spec.b,
        Exponent::BPrime => spec.bprime,
    };
    Ok(rho(m, n, spec.s) * omega(m, n, tau, b, p))
}

fn check_triple(n: i64, np: i64) -> Result<()> {
    if n == 0 || np == 0 || n == np {
        return Err(Error::Domain(format!(
            "need n, n', n - n' nonzero (n = {n}, n' = {np})"
        )));
    }
    Ok(())
}

/// Signed `l_{m,n} - l_{m',n'} - l_{m-m',n-n'}`.
pub fn resonance_defect(m: i64, n: i64, mp: i64, np: i64, p: &ModelParams) -> Result<f64> {
    check_triple(n, np)?;
    Ok(p.symbol(m, n) - p.symbol(mp, np) - p.symbol(m - mp, n - np))
}

/// `|l_{m,n} - l_{m',n'} - l_{m-m',n-n'}|`.
pub fn resonance_gap(m: i64, n: i64, mp: i64, np: i64, p: &ModelParams) -> Result<f64> {
    resonance_defect(m, n, mp, np, p).map(f64::abs)
}

/// The same gap through `(gamma m^3 / n^2) f(eta, zeta)`; needs `m != 0`.
pub fn resonance_gap_factored(m: i64, n: i64, mp: i64, np: i64, p: &ModelParams) -> Result<f64> {
    check_triple(n, np)?;
    if m == 0 {
        return Err(Error::Domain("the factored gap needs m != 0".into()));
    }
    let (mf, nf) = (m as f64, n as f64);
    let f = resonance_f_expanded(mp as f64 / mf, np as f64 / nf);
    Ok((p.gamma() * mf.powi(3) / (nf * nf) * f).abs())
}

/// `f(eta, zeta) = (eta - zeta)^2 / (zeta^2 (1 - zeta)^2) (2 zeta - 1) (eta - g(zeta))`,
/// `g(zeta) = zeta (2 - zeta) / (2 zeta - 1)`.
pub fn resonance_f(eta: f64, zeta: f64) -> Result<f64> {
    for pole in [0.0, 1.0, 0.5] {
        if zeta == pole {
            return Err(Error::Pole(zeta));
        }
    }
    let g = zeta * (2.0 - zeta) / (2.0 * zeta - 1.0);
    Ok(
        (eta - zeta).powi(2) / (zeta * zeta * (1.0 - zeta).powi(2))
            * (2.0 * zeta - 1.0)
            * (eta - g),
    )
}

/// `f` with `(2 zeta - 1)(eta - g)` multiplied out, regular at `zeta = 1/2`.
pub fn resonance_f_expanded(eta: f64, zeta: f64) -> f64 {
    (eta - zeta).powi(2) / (zeta * zeta * (1.0 - zeta).powi(2))
        * ((2.0 * zeta - 1.0) * eta - zeta * (2.0 - zeta))
}

/// `Q = |n|^{-4b} (n^2 + gap)^{2b' - 2}`.
pub fn q_factor(
    m: i64,
    n: i64,
    mp: i64,
    np: i64,
    spec: &WeightSpec,
    p: &ModelParams,
) -> Result<f64> {
    let gap = resonance_gap(m, n, mp, np, p)?;
    let nf = n.unsigned_abs() as f64;
    Ok(nf.powf(-4.0 * spec.b) * (nf * nf + gap).powf(2.0 * spec.bprime - 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn weight_at_resonance() {
        let spec = WeightSpec::new(2.6, 0.55, 0.6).unwrap();
        let p = params();
        let w = weight(1, 1, p.symbol(1, 1), &spec, Exponent::B, &p).unwrap();
        assert!((w - 2f64.powf(5.2)).abs() < 1e-12);
        assert!((w - 36.7584).abs() < 1e-4);
        assert!(weight(1, 0, 0.0, &spec, Exponent::B, &p).is_err());
    }

    #[test]
    fn gap_example() {
        let p = params();
        let g = resonance_gap(4, 1, 2, 3, &p).unwrap();
        assert!((g - 550.0 / 9.0).abs() < 1e-10);
        let g2 = resonance_gap_factored(4, 1, 2, 3, &p).unwrap();
        assert!((g - g2).abs() < 1e-10 * g);
        assert!(resonance_gap(1, 2, 1, 2, &p).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(resonance_f(0.0, 2.0).unwrap(), 0.0);
        assert!((resonance_f(1.0, 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(resonance_f(0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(resonance_f(1.0, 0.5), Err(Error::Pole(_))));
        assert!(matches!(resonance_f(1.0, 1.0), Err(Error::Pole(_))));
        assert!(matches!(resonance_f(1.0, 0.0), Err(Error::Pole(_))));
    }

    #[test]
    fn spec_window() {
        assert!(WeightSpec::new(2.6, 0.7, 0.7).is_err());
        assert!(WeightSpec::new(2.6, 0.55, 0.54).is_err());
        assert!(WeightSpec::new(2.6, 0.55, 0.61).is_err());
        assert!(WeightSpec::new(2.4, 0.55, 0.6).is_err());
        assert!(WeightSpec::new(2.6, 0.55, 0.55).is_ok());
        assert!(WeightSpec::exploratory(2.6, 0.7, 0.7)
            .unwrap()
            .is_exploratory());
        assert!(WeightSpec::exploratory(2.6, 0.5, 0.7).is_err());
    }

    #[test]
    fn q_examples() {
        let spec = WeightSpec::new(2.6, 0.55, 0.6).unwrap();
        let p = params();
        // (m, n, m', n') = (0, 1, 0, 2): all symbols vanish, gap 0
        let q = q_factor(0, 1, 0, 2, &spec, &p).unwrap();
        assert!((q - 1.0).abs() < 1e-15);
    }
}
