//! The inner time integral of the kernel,
//!
//! ```text
//! I(a, c, d; p) = int_R (a + |x|)^{-p} (c + |x - d|)^{-p} dx,   a, c > 0, p > 1,
//! ```
//!
//! which is what `int dtau1 / (omega'(tau1; b) omega''(tau - tau1; b))` becomes
//! after shifting `tau1` by `l'`: `a = n'^2`, `c = (n - n')^2`,
//! `d = tau - l' - l''`, `p = 2b`.
//!
//! Closed form: on each side of the two kinks the substitutions
//! `w = (hi - lo) / (hi + y)` and `v = (a + x) / (a + c + d)` turn the
//! pieces into incomplete beta integrals,
//!
//! ```text
//! int_0^inf (lo + y)^{-p} (hi + y)^{-p} dy = (hi - lo)^{1-2p} int_0^{1 - lo/hi} w^{2p-2} (1 - w)^{-p} dw,
//! int_0^d (a + x)^{-p} (c + d - x)^{-p} dx = S^{1-2p} int_{a/S}^{1 - c/S} v^{-p} (1 - v)^{-p} dv,
//! ```
//!
//! which are summed as binomial series on `[0, 1/2]` (reflecting the
//! variable about `1/2` where needed).

use crate::error::Result;
use crate::quadrature::{graded_breaks, integrate_with_breaks, Tolerance};

const MAX_TERMS: usize = 120;
const SERIES_EPS: f64 = 1e-17;

/// How [`crate::kernel::kernel_sum_with`] evaluates the inner integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerMethod {
    /// Incomplete-beta series (fast).
    ClosedForm,
    /// Adaptive Gauss-Kronrod with kink splitting and series tails.
    Adaptive(Tolerance),
}

/// Series tables for one exponent `p`.
#[derive(Debug, Clone)]
pub struct PowerPair {
    p: f64,
    /// `(p)_k / k!`: coefficients of `(1 - v)^{-p}`.
    rising: Vec<f64>,
    /// `(2 - 2p)_k / k!`: coefficients of `(1 - u)^{2p - 2}`.
    falling: Vec<f64>,
    /// `int_0^{1/2} w^{2p-2} (1 - w)^{-p} dw`.
    outer_head: f64,
    /// Antiderivative of `u^{-p} (1 - u)^{2p-2}` at `1/2`.
    outer_tail_half: f64,
    /// Antiderivative of `v^{-p} (1 - v)^{-p}` at `1/2`.
    middle_half: f64,
}

impl PowerPair {
    pub fn new(p: f64) -> Self {
        assert!(p > 1.0, "the two-kink integral needs p > 1");
        let mut rising = Vec::with_capacity(MAX_TERMS);
        let mut falling = Vec::with_capacity(MAX_TERMS);
        let (mut r, mut f) = (1.0, 1.0);
        for k in 0..MAX_TERMS {
            rising.push(r);
            falling.push(f);
            let kf = k as f64;
            r *= (p + kf) / (kf + 1.0);
            f *= (2.0 - 2.0 * p + kf) / (kf + 1.0);
        }
        let mut pp = Self {
            p,
            rising,
            falling,
            outer_head: 0.0,
            outer_tail_half: 0.0,
            middle_half: 0.0,
        };
        pp.outer_head = 0.5f64.powf(2.0 * p - 1.0) * pp.head_series(0.5);
        pp.outer_tail_half = antiderivative(0.5, &pp.falling, 1.0 - p);
        pp.middle_half = antiderivative(0.5, &pp.rising, 1.0 - p);
        pp
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `sum_k (p)_k/k! w^k / (k + 2p - 1)`.
    fn head_series(&self, w: f64) -> f64 {
        let mut acc = 0.0;
        let mut wk = 1.0;
        for (k, c) in self.rising.iter().enumerate() {
            let term = c * wk / (k as f64 + 2.0 * self.p - 1.0);
            acc += term;
            if term.abs() <= SERIES_EPS * acc.abs() {
                break;
            }
            wk *= w;
        }
        acc
    }

    /// `int_0^inf (lo + y)^{-p} (hi + y)^{-p} dy`.
    pub fn outer(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let p = self.p;
        let w1 = (hi - lo) / hi;
        if w1 <= 0.5 {
            return hi.powf(1.0 - 2.0 * p) * self.head_series(w1);
        }
        let x0 = lo / hi;
        let tail = if x0 < 0.25 {
            self.outer_tail_half - antiderivative(x0, &self.falling, 1.0 - p)
        } else {
            difference(x0, 0.5, &self.falling, 1.0 - p)
        };
        (hi - lo).powf(1.0 - 2.0 * p) * (self.outer_head + tail)
    }

    /// `int_0^d (a + x)^{-p} (c + d - x)^{-p} dx`.
    pub fn middle(&self, a: f64, c: f64, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        let p = self.p;
        let s = a + c + d;
        let v0 = a / s;
        let v1 = (a + d) / s;
        let u0 = c / s;
        let mut acc = 0.0;
        // left of 1/2: v in [v0, min(v1, 1/2)]
        if v0 < 0.5 {
            acc += if v1 >= 0.5 {
                self.half_to(v0)
            } else {
                difference(v0, v1, &self.rising, 1.0 - p)
            };
        }
        // right of 1/2, reflected: u = 1 - v in [c/S, min(1 - v0, 1/2)]
        if v1 > 0.5 {
            acc += if v0 <= 0.5 {
                self.half_to(u0)
            } else {
                difference(u0, 1.0 - v0, &self.rising, 1.0 - p)
            };
        }
        s.powf(1.0 - 2.0 * p) * acc
    }

    /// `int_x^{1/2} v^{-p} (1 - v)^{-p} dv`.
    fn half_to(&self, x: f64) -> f64 {
        if x < 0.25 {
            self.middle_half - antiderivative(x, &self.rising, 1.0 - self.p)
        } else {
            difference(x, 0.5, &self.rising, 1.0 - self.p)
        }
    }

    /// `I(a, c, d; p)` by the closed form.
    pub fn integral(&self, a: f64, c: f64, d: f64) -> f64 {
        let d = d.abs();
        self.outer(a, c + d) + self.outer(c, a + d) + self.middle(a, c, d)
    }
}

/// `sum_k coef_k x^{q0+k} / (q0 + k)` (a `ln x` term where `q0 + k = 0`).
fn antiderivative(x: f64, coef: &[f64], q0: f64) -> f64 {
    let mut acc = 0.0;
    let mut xq = x.powf(q0);
    for (k, c) in coef.iter().enumerate() {
        let q = q0 + k as f64;
        let term = if q.abs() < 1e-12 {
            c * x.ln()
        } else {
            c * xq / q
        };
        acc += term;
        if k > 0 && term.abs() <= SERIES_EPS * acc.abs() {
            break;
        }
        xq *= x;
    }
    acc
}

/// `sum_k coef_k (x1^{q_k} - x0^{q_k}) / q_k` for `0 < x0 < x1 <= 1/2`,
/// `q_k = q0 + k`, without cancellation when `x0` is close to `x1`.
fn difference(x0: f64, x1: f64, coef: &[f64], q0: f64) -> f64 {
    if x1 <= x0 {
        return 0.0;
    }
    if x0 < 0.5 * x1 {
        return antiderivative(x1, coef, q0) - antiderivative(x0, coef, q0);
    }
    let gap = x1 - x0;
    let lr = (gap / x0).ln_1p();
    let mut x0q = x0.powf(q0);
    // D_0 = x1^{q0} - x0^{q0}
    let mut dk = x0q * (q0 * lr).exp_m1();
    let mut acc = 0.0;
    for (k, c) in coef.iter().enumerate() {
        let q = q0 + k as f64;
        let term = if q.abs() < 1e-12 { c * lr } else { c * dk / q };
        acc += term;
        if k > 0 && term.abs() <= SERIES_EPS * acc.abs() {
            break;
        }
        // D_{k+1} = x1 D_k + (x1 - x0) x0^{q_k}
        dk = x1 * dk + gap * x0q;
        x0q *= x0;
    }
    acc
}

/// `I(a, c, d; p)` by the closed form.
pub fn two_kink_integral(a: f64, c: f64, d: f64, p: f64) -> f64 {
    PowerPair::new(p).integral(a, c, d)
}

/// `int_Y^inf (a1 + y)^{-p} (c1 + y)^{-p} dy` for `Y` well beyond both
/// offsets, by expanding about the midpoint `z = y + (a1 + c1)/2`.
fn far_tail(a1: f64, c1: f64, y: f64, p: f64) -> f64 {
    let z = y + 0.5 * (a1 + c1);
    let h2 = (0.5 * (c1 - a1)).powi(2);
    let ratio = h2 / (z * z);
    let mut coef = 1.0;
    let mut zpow = z.powf(1.0 - 2.0 * p);
    let mut acc = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let term = coef * zpow / (2.0 * p + 2.0 * kf - 1.0);
        acc += term;
        if term.abs() <= SERIES_EPS * acc.abs() {
            break;
        }
        coef *= (p + kf) / (kf + 1.0);
        zpow *= ratio;
    }
    acc
}

/// `I(a, c, d; p)` by adaptive Gauss-Kronrod between the kinks, with
/// geometric grading towards them, and series tails beyond `8 (a + c + |d|)`.
pub fn two_kink_integral_adaptive(a: f64, c: f64, d: f64, p: f64, tol: Tolerance) -> Result<f64> {
    let d = d.abs();
    let span = 8.0 * (a + c + d);
    let f = |x: f64| ((a + x.abs()) * (c + (x - d).abs())).powf(-p);
    let mut breaks = vec![0.0, d];
    graded_breaks(0.0, -a / 8.0, span, &mut breaks);
    graded_breaks(d, c / 8.0, span, &mut breaks);
    if d > 0.0 {
        graded_breaks(0.0, a / 8.0, 0.5 * d, &mut breaks);
        graded_breaks(d, -c / 8.0, 0.5 * d, &mut breaks);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let core = integrate_with_breaks(f, -span, d + span, &breaks, tol)?;
    let left = far_tail(a, c + d, span, p);
    let right = far_tail(a + d, c, span, p);
    Ok(core.value + left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_offsets_no_separation() {
        // d = 0, a = c: int (a + |x|)^{-2p} = 2 a^{1-2p} / (2p - 1)
        let p = 1.2;
        let a: f64 = 3.0;
        let exact = 2.0 * a.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
        assert!((two_kink_integral(a, a, 0.0, p) - exact).abs() < 1e-14 * exact);
    }

    #[test]
    fn closed_form_matches_adaptive() {
        let tol = Tolerance::relative(1e-12);
        for &p in &[1.1, 1.2, 1.3] {
            let pp = PowerPair::new(p);
            for &(a, c, d) in &[
                (1.0, 1.0, 0.0),
                (1.0, 4.0, 0.3),
                (9.0, 1.0, 2.5),
                (1.0, 100.0, 1e4),
                (25.0, 36.0, 1e-3),
                (1.0, 1.0, 1e7),
                (400.0, 1.0, 17.0),
                (2.0, 3.0, -40.0),
            ] {
                let exact = pp.integral(a, c, d);
                let quad = two_kink_integral_adaptive(a, c, d, p, tol).unwrap();
                assert!(
                    (exact - quad).abs() <= 1e-10 * quad,
                    "p={p} a={a} c={c} d={d}: {exact} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn symmetric_in_offsets_and_sign() {
        let pp = PowerPair::new(1.1);
        let x = pp.integral(4.0, 9.0, 3.5);
        assert!((x - pp.integral(9.0, 4.0, 3.5)).abs() < 1e-15 * x);
        assert!((x - pp.integral(4.0, 9.0, -3.5)).abs() < 1e-15 * x);
    }

    #[test]
    fn far_tail_matches_quadrature() {
        let p = 1.1;
        let y = 50.0;
        let series = far_tail(1.0, 5.0, y, p);
        // substitute y = Y / t
        let est = crate::quadrature::integrate(
            |t: f64| {
                if t == 0.0 {
                    return 0.0;
                }
                let yy = y / t;
                ((1.0 + yy) * (5.0 + yy)).powf(-p) * y / (t * t)
            },
            0.0,
            1.0,
            Tolerance::relative(1e-13),
        )
        .unwrap();
        assert!((series - est.value).abs() < 1e-12 * series);
    }
}
