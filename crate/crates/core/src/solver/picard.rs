use num_complex::Complex64;
use rayon::prelude::*;

use super::phi::{phi1, phi2};
use super::{linear_rates, PicardReport, SolverConfig, Trajectory, WindowLog, MAX_HALVINGS};
use crate::error::{Error, Result};
use crate::field::{enforce_symmetry_in_place, SpectralField};
use crate::params::{GridSpec, ModelParams};
use crate::transform::SpectralTransform;

/// Whether the quadratic term enters the Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    Full,
    /// Linear flow only; isolates the exponential weights.
    Zero,
}

/// Consecutive residual increases tolerated before the iteration is
/// declared divergent.
const GROWTH_LIMIT: usize = 3;

/// Per-window constants: node times and exponential-trapezoid weights.
struct WindowWeights {
    h: f64,
    /// `e^{lambda h}` per mode.
    step: Vec<Complex64>,
    /// Weight on the left node, `h (phi1 - phi2)`.
    w_left: Vec<Complex64>,
    /// Weight on the right node, `h phi2`.
    w_right: Vec<Complex64>,
    /// `e^{lambda t_k}` relative to the window start, per node and mode.
    free: Vec<Vec<Complex64>>,
}

impl WindowWeights {
    fn new(rates: &[Complex64], delta: f64, nodes: usize) -> Self {
        let h = delta / (nodes - 1) as f64;
        let mut step = Vec::with_capacity(rates.len());
        let mut w_left = Vec::with_capacity(rates.len());
        let mut w_right = Vec::with_capacity(rates.len());
        for &r in rates {
            let z = r * h;
            let p1 = phi1(z);
            let p2 = phi2(z);
            step.push(z.exp());
            w_left.push((p1 - p2) * h);
            w_right.push(p2 * h);
        }
        let free = (0..nodes)
            .map(|k| rates.iter().map(|&r| (r * (k as f64 * h)).exp()).collect())
            .collect();
        Self {
            h,
            step,
            w_left,
            w_right,
            free,
        }
    }
}

struct Stepper<'a> {
    transform: &'a SpectralTransform,
    params: &'a ModelParams,
    rates: Vec<Complex64>,
    config: SolverConfig,
    forcing: Forcing,
}

impl<'a> Stepper<'a> {
    fn forcing_term(&self, v: &SpectralField) -> Vec<Complex64> {
        let n = v.grid.n_coeffs();
        match self.forcing {
            Forcing::Zero => vec![Complex64::new(0.0, 0.0); n],
            Forcing::Full => {
                let g = (self.params.beta() * v.time).exp();
                self.transform
                    .nonlinear_unchecked(v)
                    .coeffs
                    .into_iter()
                    .map(|a| a * g)
                    .collect()
            }
        }
    }

    /// Fixed point on `[c0.time, c0.time + delta]`; returns all nodes.
    fn window(&self, c0: &SpectralField, delta: f64) -> (Vec<SpectralField>, PicardReport) {
        let k_nodes = self.config.nodes_per_window;
        let w = WindowWeights::new(&self.rates, delta, k_nodes);
        let t0 = c0.time;
        let grid = c0.grid;
        let n_modes = grid.n_coeffs();

        let linear: Vec<SpectralField> = (0..k_nodes)
            .map(|k| SpectralField {
                grid,
                coeffs: c0
                    .coeffs
                    .iter()
                    .zip(&w.free[k])
                    .map(|(v, e)| v * e)
                    .collect(),
                time: if k + 1 == k_nodes {
                    t0 + delta
                } else {
                    t0 + k as f64 * w.h
                },
            })
            .collect();
        let mut iterate = linear.clone();
        let n0 = self.forcing_term(c0);

        let mut history = Vec::new();
        let mut growth = 0usize;
        let mut converged = false;
        let mut floor = 0.0;
        for _ in 0..self.config.picard_max_iter {
            let forcing: Vec<Vec<Complex64>> = iterate[1..]
                .par_iter()
                .map(|v| self.forcing_term(v))
                .collect();
            let mut next = linear.clone();
            let mut acc = vec![Complex64::new(0.0, 0.0); n_modes];
            let mut residual: f64 = 0.0;
            let mut scale: f64 = c0.max_abs();
            for k in 1..k_nodes {
                let left = if k == 1 { &n0 } else { &forcing[k - 2] };
                let right = &forcing[k - 1];
                let node = &mut next[k];
                for i in 0..n_modes {
                    acc[i] = w.step[i] * acc[i] + w.w_left[i] * left[i] + w.w_right[i] * right[i];
                    node.coeffs[i] += acc[i];
                }
                enforce_symmetry_in_place(node);
                for (a, b) in node.coeffs.iter().zip(&iterate[k].coeffs) {
                    let d = (a - b).norm();
                    residual = if d.is_nan() {
                        f64::NAN
                    } else {
                        residual.max(d)
                    };
                }
                scale = scale.max(node.max_abs());
            }
            iterate = next;
            floor = 100.0 * f64::EPSILON * scale;
            if !residual.is_finite() {
                history.push(f64::INFINITY);
                break;
            }
            if let Some(&prev) = history.last() {
                if residual > prev && residual > floor {
                    growth += 1;
                } else {
                    growth = 0;
                }
            }
            history.push(residual.max(f64::MIN_POSITIVE));
            let settled = residual <= floor
                || (residual <= self.config.picard_tol
                    && (history.len() >= 2 || history[0] <= floor));
            if settled {
                converged = true;
                break;
            }
            if growth >= GROWTH_LIMIT {
                break;
            }
        }
        let contraction_ratio = contraction_ratio(&history, floor);
        let report = PicardReport {
            iterations: history.len(),
            residual_history: history,
            contraction_ratio,
            window: delta,
            halvings: 0,
            converged,
        };
        (iterate, report)
    }

    /// Window with optional halving on failure.
    fn adaptive_window(
        &self,
        c0: &SpectralField,
        delta: f64,
    ) -> Result<(Vec<SpectralField>, PicardReport)> {
        let mut d = delta;
        let mut halvings = 0;
        loop {
            let (nodes, mut report) = self.window(c0, d);
            report.halvings = halvings;
            if report.converged {
                return Ok((nodes, report));
            }
            if !self.config.adapt_window || halvings >= MAX_HALVINGS {
                return Err(Error::ContractionFailure {
                    report,
                    partial: None,
                });
            }
            d *= 0.5;
            halvings += 1;
        }
    }
}

/// Geometric mean of `r_{j+1} / r_j` over pairs with both residuals above
/// the round-off floor. Without such a pair, the first pair with `r_j`
/// above the floor bounds the ratio by `max(r_{j+1}, floor) / r_j`; when
/// the first residual is already at the floor the ratio is `0`.
fn contraction_ratio(history: &[f64], floor: f64) -> f64 {
    let mut log_sum = 0.0;
    let mut count = 0usize;
    let mut bound = None;
    for pair in history.windows(2) {
        if !(pair[0] > floor && pair[0].is_finite()) {
            continue;
        }
        if pair[1] > floor {
            log_sum += (pair[1] / pair[0]).ln();
            count += 1;
        } else if bound.is_none() {
            bound = Some(floor / pair[0]);
        }
    }
    if count > 0 {
        return (log_sum / count as f64).exp();
    }
    if let Some(b) = bound {
        return b;
    }
    if history.len() == 1 && history[0] > floor {
        return f64::INFINITY;
    }
    0.0
}

fn check_inputs(c0: &SpectralField, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    c0.check_symmetry()
}

/// One Picard window `[c0.time, c0.time + config.window]` (halving the
/// window on failure when `adapt_window` is set). Returns every node.
pub fn picard_window(
    c0: &SpectralField,
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<(Vec<SpectralField>, PicardReport)> {
    picard_window_with(c0, params, config, Forcing::Full)
}

pub fn picard_window_with(
    c0: &SpectralField,
    params: &ModelParams,
    config: &SolverConfig,
    forcing: Forcing,
) -> Result<(Vec<SpectralField>, PicardReport)> {
    check_inputs(c0, config)?;
    let transform = SpectralTransform::new(c0.grid);
    let stepper = Stepper {
        transform: &transform,
        params,
        rates: linear_rates(c0.grid, params),
        config: *config,
        forcing,
    };
    stepper.adaptive_window(c0, config.window)
}

/// Chained windows from `c0.time` to `t_end`. A reduced window length is
/// kept for the remainder of the run.
pub fn solve(
    c0: &SpectralField,
    t_end: f64,
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<Trajectory> {
    check_inputs(c0, config)?;
    if t_end < c0.time || t_end.is_nan() {
        return Err(Error::BackwardTime(t_end - c0.time));
    }
    let grid: GridSpec = c0.grid;
    let transform = SpectralTransform::new(grid);
    let stepper = Stepper {
        transform: &transform,
        params,
        rates: linear_rates(grid, params),
        config: *config,
        forcing: Forcing::Full,
    };
    let mut traj = Trajectory {
        snapshots: vec![c0.clone()],
        params: *params,
        config: *config,
        contraction_log: Vec::new(),
    };
    let mut delta = config.window;
    let mut current = c0.clone();
    loop {
        let remaining = t_end - current.time;
        if remaining <= 1e-12 * delta.max(t_end.abs()) {
            break;
        }
        let (d, last) = if remaining <= delta * (1.0 + 1e-9) {
            (remaining, true)
        } else {
            (delta, false)
        };
        match stepper.adaptive_window(&current, d) {
            Ok((mut nodes, report)) => {
                traj.contraction_log.push(WindowLog {
                    t_start: current.time,
                    window: report.window,
                    iterations: report.iterations,
                    residual: *report.residual_history.last().unwrap_or(&0.0),
                    contraction_ratio: report.contraction_ratio,
                });
                if report.halvings > 0 {
                    delta = report.window;
                }
                let finished = last && report.halvings == 0;
                if finished {
                    nodes.last_mut().unwrap().time = t_end;
                }
                current = nodes.last().unwrap().clone();
                if config.record_interior {
                    traj.snapshots.extend(nodes.into_iter().skip(1));
                } else {
                    traj.snapshots.push(current.clone());
                }
                if finished {
                    break;
                }
            }
            Err(Error::ContractionFailure { report, .. }) => {
                return Err(Error::ContractionFailure {
                    report,
                    partial: Some(Box::new(traj)),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_geometric_sequence() {
        let h = [1e-2, 1e-3, 1e-4, 1e-5];
        assert!((contraction_ratio(&h, 1e-16) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ratio_ignores_floor_pairs() {
        let h = [1e-2, 1e-3, 1e-17, 1e-18];
        assert!((contraction_ratio(&h, 1e-15) - 0.1).abs() < 1e-12);
        // only a floored pair: reported as a bound
        let h = [1e-3, 1e-17];
        assert!((contraction_ratio(&h, 1e-15) - 1e-12).abs() < 1e-24);
        assert_eq!(contraction_ratio(&[1e-20], 1e-15), 0.0);
    }
}
