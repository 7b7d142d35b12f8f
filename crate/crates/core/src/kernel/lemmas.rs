//! Numerical spot checks of the appendix inequalities: each section
//! reports `max LHS/RHS` over a parameter grid, and again on a grid of
//! twice the density with a 100x tighter quadrature tolerance.

use rayon::prelude::*;

use super::inner::two_kink_integral_adaptive;
use super::WeightSpec;
use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, integrate_with_breaks, Tolerance};

/// Grid density (points per decade) and base quadrature tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaGrids {
    pub density: usize,
    pub tol: f64,
}

impl Default for LemmaGrids {
    fn default() -> Self {
        Self {
            density: 4,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub params: [f64; 4],
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaSection {
    pub name: &'static str,
    pub columns: [&'static str; 4],
    /// Marked rows (equality points, named probes) plus the maximizer.
    pub rows: Vec<LemmaRow>,
    pub max_ratio: f64,
    pub argmax: LemmaRow,
    pub refined_max: f64,
    pub rel_change: f64,
}

impl LemmaSection {
    pub fn is_stable(&self, threshold: f64) -> bool {
        self.max_ratio.is_finite() && self.refined_max.is_finite() && self.rel_change <= threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub sections: Vec<LemmaSection>,
}

impl LemmaReport {
    pub fn is_stable(&self, threshold: f64) -> bool {
        self.sections.iter().all(|s| s.is_stable(threshold))
    }

    pub fn section(&self, name: &str) -> Option<&LemmaSection> {
        self.sections.iter().find(|s| s.name == name)
    }
}

/// `10^{i/density}` for `lo_exp*density <= i <= hi_exp*density`.
fn log_grid(lo_exp: i32, hi_exp: i32, density: usize) -> Vec<f64> {
    let d = density as i32;
    (lo_exp * d..=hi_exp * d)
        .map(|i| 10f64.powf(i as f64 / d as f64))
        .collect()
}

fn signed_grid(lo_exp: i32, hi_exp: i32, density: usize) -> Vec<f64> {
    let pos = log_grid(lo_exp, hi_exp, density);
    let mut out: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    out.push(0.0);
    out.extend(pos);
    out
}

/// First inequality of Lemma 4.2.a as `LHS / RHS`:
/// `(k3 + |tau - k2|)^{-2(1-b')} (k3 + |tau - k4|)^{-2b}` over
/// `k3^{-2b} (k3 + |k2 - k4|)^{-2(1-b')}`. With `swap`, the exponents of
/// the two left factors are interchanged (second inequality).
pub fn lemma_42a_ratio(
    k2: f64,
    k3: f64,
    k4: f64,
    tau: f64,
    b: f64,
    bprime: f64,
    swap: bool,
) -> f64 {
    let e1 = 2.0 * (1.0 - bprime);
    let e2 = 2.0 * b;
    let (ea, eb) = if swap { (e2, e1) } else { (e1, e2) };
    let lhs = (k3 + (tau - k2).abs()).powf(-ea) * (k3 + (tau - k4).abs()).powf(-eb);
    let rhs = k3.powf(-e2) * (k3 + (k2 - k4).abs()).powf(-e1);
    lhs / rhs
}

/// Lemma 4.2.c as `LHS / RHS`, LHS by adaptive quadrature:
/// `int (k1 + |tau - k2|)^{-2b} (k3 + |tau - k4|)^{-2b} dtau`
/// over `k1^{1-2b} (k3 + |k2 - k4|)^{-2b}`.
pub fn lemma_42c_ratio(k1: f64, k3: f64, sep: f64, b: f64, tol: f64) -> Result<f64> {
    let lhs = two_kink_integral_adaptive(k1, k3, sep, 2.0 * b, Tolerance::relative(tol))?;
    Ok(lhs * k1.powf(2.0 * b - 1.0) * (k3 + sep.abs()).powf(2.0 * b))
}

/// `int_R (1 + |tau - xi1^3 - (xi - xi1)^3|)^{-2b} dxi1`.
///
/// With `u = xi1 - xi/2` the phase is `c - q u^2`, `c = tau - xi^3/4`,
/// `q = 3 xi`; the integrand is even in `u`, kinked at `u^2 = c/q`, and
/// beyond `U` with `q U^2 >= 16 (|c| + 1)` the tail is a binomial series.
pub fn lemma_46_lhs(tau: f64, xi: f64, b: f64, tol: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::Domain("lemma 4.6 needs xi != 0".into()));
    }
    let (mut c, mut q) = (tau - xi.powi(3) / 4.0, 3.0 * xi);
    if q < 0.0 {
        c = -c;
        q = -q;
    }
    let e = 2.0 * b;
    let f = |u: f64| (1.0 + (c - q * u * u).abs()).powf(-e);
    let big_u = 4.0 * ((c.abs() + 1.0) / q).sqrt();
    let mut breaks = Vec::new();
    let base = (1.0 / q).sqrt() / 8.0;
    graded_breaks(0.0, base, big_u, &mut breaks);
    if c > 0.0 {
        let us = (c / q).sqrt();
        breaks.push(us);
        let width = (1.0 / (2.0 * q * us)).min(us) / 8.0;
        graded_breaks(us, width, big_u - us, &mut breaks);
        graded_breaks(us, -width, us, &mut breaks);
    }
    breaks.retain(|x| *x > 0.0 && *x < big_u);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let core = integrate_with_breaks(f, 0.0, big_u, &breaks, Tolerance::relative(tol))?;
    // tail: (1 + q u^2 - c)^{-e} = q^{-e} u^{-2e} (1 + r / u^2)^{-e}, r = (1 - c)/q
    let r = (1.0 - c) / q;
    let mut coef = 1.0;
    let mut acc = 0.0;
    let mut upow = big_u.powf(1.0 - 2.0 * e);
    let ratio = r / (big_u * big_u);
    for k in 0..200 {
        let kf = k as f64;
        let term = coef * upow / (2.0 * e + 2.0 * kf - 1.0);
        acc += term;
        if term.abs() <= 1e-17 * acc.abs() {
            break;
        }
        coef *= -(e + kf) / (kf + 1.0);
        upow *= ratio;
    }
    let tail = q.powf(-e) * acc;
    Ok(2.0 * (core.value + tail))
}

/// Lemma 4.6 as `LHS * sqrt|xi| (1 + |4 tau - xi^3|)^{1/2}`.
pub fn lemma_46_ratio(tau: f64, xi: f64, b: f64, tol: f64) -> Result<f64> {
    let lhs = lemma_46_lhs(tau, xi, b, tol)?;
    Ok(lhs * xi.abs().sqrt() * (1.0 + (4.0 * tau - xi.powi(3)).abs()).sqrt())
}

struct Scan {
    rows: Vec<LemmaRow>,
    max: f64,
    argmax: LemmaRow,
}

fn reduce(all: Vec<LemmaRow>, keep: impl Fn(&LemmaRow) -> bool) -> Scan {
    let mut max = f64::NEG_INFINITY;
    let mut argmax = LemmaRow {
        params: [f64::NAN; 4],
        ratio: f64::NAN,
    };
    for r in &all {
        if r.ratio.is_nan() || r.ratio > max {
            max = r.ratio;
            argmax = r.clone();
            if r.ratio.is_nan() {
                break;
            }
        }
    }
    let rows = all.into_iter().filter(|r| keep(r)).collect();
    Scan { rows, max, argmax }
}

fn scan_42a(spec: &WeightSpec, density: usize, swap: bool) -> Scan {
    let (b, bp) = (spec.b(), spec.bprime());
    let k3s = log_grid(0, 3, density);
    let seps = signed_grid(-2, 4, density);
    let offsets = signed_grid(-3, 5, density);
    let mut all = Vec::new();
    for &k4 in &[0.0, 7.5] {
        for &k3 in &k3s {
            for &s in &seps {
                let k2 = k4 + s;
                // the extremal point: tau = k4 (first form) or k2 (second)
                let anchor = if swap { k2 } else { k4 };
                for &o in &offsets {
                    let tau = anchor + o;
                    all.push(LemmaRow {
                        params: [k2, k3, k4, tau],
                        ratio: lemma_42a_ratio(k2, k3, k4, tau, b, bp, swap),
                    });
                }
            }
        }
    }
    reduce(all, |r| {
        let anchor = if swap { r.params[0] } else { r.params[2] };
        r.params[3] == anchor && r.params[1] <= 10.0
    })
}

fn scan_42c(spec: &WeightSpec, density: usize, tol: f64) -> Result<Scan> {
    let b = spec.b();
    let ks = log_grid(0, 3, density);
    let mut seps = vec![0.0];
    seps.extend(log_grid(-2, 5, density));
    let mut cases = Vec::new();
    for (i, &k1) in ks.iter().enumerate() {
        for &k3 in &ks[i..] {
            for &s in &seps {
                cases.push((k1, k3, s));
            }
        }
    }
    let all: Result<Vec<LemmaRow>> = cases
        .par_iter()
        .map(|&(k1, k3, s)| {
            Ok(LemmaRow {
                params: [k1, 0.0, k3, s],
                ratio: lemma_42c_ratio(k1, k3, s, b, tol)?,
            })
        })
        .collect();
    Ok(reduce(all?, |r| r.params[0] == 1.0 && r.params[2] == 1.0))
}

fn scan_46(spec: &WeightSpec, density: usize, tol: f64) -> Result<Scan> {
    let b = spec.b();
    let xis = {
        let pos = log_grid(-2, 2, density);
        let mut v: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        v.extend(pos);
        v
    };
    let ws = signed_grid(-2, 6, density);
    let mut cases = Vec::new();
    for &xi in &xis {
        for &w in &ws {
            cases.push((xi, w));
        }
    }
    let all: Result<Vec<LemmaRow>> = cases
        .par_iter()
        .map(|&(xi, w)| {
            let tau = if w == 0.0 {
                xi.powi(3) / 4.0
            } else {
                (w + xi.powi(3)) / 4.0
            };
            Ok(LemmaRow {
                params: [tau, xi, w, 0.0],
                ratio: lemma_46_ratio(tau, xi, b, tol)?,
            })
        })
        .collect();
    Ok(reduce(all?, |r| r.params[1] == 1.0 && r.params[2] == 0.0))
}

fn section(
    name: &'static str,
    columns: [&'static str; 4],
    coarse: Scan,
    fine: Scan,
) -> LemmaSection {
    let rel_change = if coarse.max.is_finite() && fine.max.is_finite() && fine.max != 0.0 {
        (fine.max - coarse.max).abs() / fine.max.abs()
    } else {
        f64::INFINITY
    };
    let mut rows = coarse.rows;
    rows.push(coarse.argmax.clone());
    LemmaSection {
        name,
        columns,
        rows,
        max_ratio: coarse.max,
        argmax: coarse.argmax,
        refined_max: fine.max,
        rel_change,
    }
}

/// Runs the Lemma 4.2.a (both forms), 4.2.c and 4.6 grids at `grids` and at
/// the refined setting.
pub fn check_appendix_lemmas(spec: &WeightSpec, grids: LemmaGrids) -> Result<LemmaReport> {
    if grids.density == 0 || !(grids.tol > 0.0) {
        return Err(Error::InvalidParams(
            "lemma grids need density >= 1 and tol > 0".into(),
        ));
    }
    let (d, t) = (grids.density, grids.tol);
    let (d2, t2) = (2 * d, grids.tol * 1e-2);
    let sections = vec![
        section(
            "4.2.a(i)",
            ["k2", "k3", "k4", "tau"],
            scan_42a(spec, d, false),
            scan_42a(spec, d2, false),
        ),
        section(
            "4.2.a(ii)",
            ["k2", "k3", "k4", "tau"],
            scan_42a(spec, d, true),
            scan_42a(spec, d2, true),
        ),
        section(
            "4.2.c",
            ["k1", "-", "k3", "|k2-k4|"],
            scan_42c(spec, d, t)?,
            scan_42c(spec, d2, t2)?,
        ),
        section(
            "4.6",
            ["tau", "xi", "4tau-xi^3", "-"],
            scan_46(spec, d, t)?,
            scan_46(spec, d2, t2)?,
        ),
    ];
    Ok(LemmaReport { sections })
}
