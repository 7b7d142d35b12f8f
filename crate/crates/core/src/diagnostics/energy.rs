use crate::field::{PhysicalField, SpectralField};
use crate::solver::Trajectory;
use crate::transform::SpectralTransform;

use super::MODE_WEIGHT;
use std::f64::consts::PI;

/// `||v||^2` of the coefficient field, without any `e^{beta t}` factor.
pub fn coeff_energy(c: &SpectralField) -> f64 {
    MODE_WEIGHT * c.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// `||v_y||^2` of the coefficient field.
pub fn coeff_dissipation(c: &SpectralField) -> f64 {
    let g = c.grid;
    MODE_WEIGHT
        * c.coeffs
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let n = g.mode(idx).1 as f64;
                n * n * v.norm_sqr()
            })
            .sum::<f64>()
}

/// `int int u^2 dy dx` by Parseval (the y-mean profile, if any, included).
pub fn l2_energy(f: &PhysicalField) -> f64 {
    let tr = SpectralTransform::new(f.grid);
    let (c, mean) = tr
        .forward_with_mean(f)
        .expect("a field's own grid always matches its transform");
    let nx = mean.len() as f64;
    let mean_sq = mean.iter().map(|v| v * v).sum::<f64>() / nx;
    coeff_energy(&c) + 2.0 * PI * PI * mean_sq
}

/// `||u_y||^2` by spectral differentiation and Parseval.
pub fn dissipation(f: &PhysicalField) -> f64 {
    let tr = SpectralTransform::new(f.grid);
    let (c, _) = tr
        .forward_with_mean(f)
        .expect("a field's own grid always matches its transform");
    coeff_dissipation(&c)
}

/// Time series of the energy identity
/// `1/2 ||u||^2 + alpha int ||u_y||^2 = 1/2 ||u0||^2 + beta int ||u||^2`
/// on the physical field `u = e^{beta t} v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    /// `||u(t)||^2`.
    pub energy: Vec<f64>,
    /// Trapezoid-accumulated `int_0^t ||u_y||^2 ds`.
    pub dissipation_cum: Vec<f64>,
    /// Trapezoid-accumulated `int_0^t ||u||^2 ds`.
    pub energy_cum: Vec<f64>,
    pub balance_residual: Vec<f64>,
    /// `||u||^2 e^{-2(beta - alpha) t} / ||u0||^2 - 1`; non-positive up to
    /// round-off for every exact solution.
    pub gronwall_margin: Vec<f64>,
}

impl EnergyLedger {
    /// `1/2 ||u0||^2`, the reference scale for `balance_residual`.
    pub fn energy_scale(&self) -> f64 {
        self.energy.first().map_or(0.0, |e| 0.5 * e)
    }

    pub fn max_relative_residual(&self) -> f64 {
        let scale = self.energy_scale();
        let worst = self.balance_residual.iter().copied().fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn energy_balance(traj: &Trajectory) -> EnergyLedger {
    let p = traj.params;
    let t0 = traj.snapshots.first().map_or(0.0, |s| s.time);
    let mut ledger = EnergyLedger {
        times: Vec::new(),
        energy: Vec::new(),
        dissipation_cum: Vec::new(),
        energy_cum: Vec::new(),
        balance_residual: Vec::new(),
        gronwall_margin: Vec::new(),
    };
    let mut prev: Option<(f64, f64, f64)> = None;
    let (mut dcum, mut ecum) = (0.0, 0.0);
    for snap in &traj.snapshots {
        let g = (2.0 * p.beta() * snap.time).exp();
        let e = g * coeff_energy(snap);
        let d = g * coeff_dissipation(snap);
        if let Some((tp, ep, dp)) = prev {
            let h = snap.time - tp;
            dcum += 0.5 * h * (d + dp);
            ecum += 0.5 * h * (e + ep);
        }
        prev = Some((snap.time, e, d));
        let e0 = ledger.energy.first().copied().unwrap_or(e);
        let residual = (0.5 * e + p.alpha() * dcum - 0.5 * e0 - p.beta() * ecum).abs();
        let margin = if e0 > 0.0 {
            e * (-2.0 * (p.beta() - p.alpha()) * (snap.time - t0)).exp() / e0 - 1.0
        } else {
            0.0
        };
        ledger.times.push(snap.time);
        ledger.energy.push(e);
        ledger.dissipation_cum.push(dcum);
        ledger.energy_cum.push(ecum);
        ledger.balance_residual.push(residual);
        ledger.gronwall_margin.push(margin);
    }
    ledger
}
