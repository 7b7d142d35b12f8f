use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::params::{GridSpec, ModelParams};
use crate::solver::Trajectory;
use crate::transform::SpectralTransform;

use super::MODE_WEIGHT;

/// Relative tolerance on equal snapshot spacing.
const SPACING_TOL: f64 = 1e-9;

/// Physical coefficients of one snapshot: the `n >= 1` lattice plus the
/// y-mean profile as x-modes.
struct Modal {
    time: f64,
    coeffs: Vec<Complex64>,
    mean: Vec<Complex64>,
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::Spacing(format!(
            "need at least 3 snapshots, got {}",
            times.len()
        )));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Spacing("snapshot times must increase".into()));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > SPACING_TOL * dt {
            return Err(Error::Spacing(format!(
                "step {} differs from mean step {dt}",
                w[1] - w[0]
            )));
        }
    }
    Ok(dt)
}

/// Normalized L² residual of the PDE at interior snapshots of a solver
/// trajectory. Time derivatives are centered differences; space
/// derivatives are spectral. Each value is `||R|| / sum_k ||term_k||` so
/// it is dimensionless and independent of the step size apart from the
/// differencing error.
pub fn pde_residual(traj: &Trajectory, p: &ModelParams) -> Result<Vec<f64>> {
    let times = traj.times();
    uniform_step(&times)?;
    let modal: Vec<Modal> = traj
        .snapshots
        .iter()
        .map(|s| {
            let g = (p.beta() * s.time).exp();
            Modal {
                time: s.time,
                coeffs: s.coeffs.iter().map(|v| v * g).collect(),
                mean: vec![Complex64::new(0.0, 0.0); s.grid.nx],
            }
        })
        .collect();
    residual_series(traj.grid(), &modal, p)
}

/// Same residual for physical fields that may carry a y-mean profile
/// `C(x)` (e.g. the output of [`crate::solver::gauge_transform`]). The
/// quadratic term then includes the cross term `2 C u`.
pub fn pde_residual_physical(fields: &[PhysicalField], p: &ModelParams) -> Result<Vec<f64>> {
    let times: Vec<f64> = fields.iter().map(|f| f.time).collect();
    uniform_step(&times)?;
    let grid = fields[0].grid;
    let tr = SpectralTransform::new(grid);
    let mut modal = Vec::with_capacity(fields.len());
    for f in fields {
        let (c, mean) = tr.forward_with_mean(f)?;
        let nx = grid.nx;
        let mut line: Vec<Complex64> = mean.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        rustfft::FftPlanner::new()
            .plan_fft_forward(nx)
            .process(&mut line);
        line.iter_mut().for_each(|v| *v /= nx as f64);
        modal.push(Modal {
            time: f.time,
            coeffs: c.coeffs,
            mean: line,
        });
    }
    residual_series(grid, &modal, p)
}

fn residual_series(grid: GridSpec, modal: &[Modal], p: &ModelParams) -> Result<Vec<f64>> {
    let dt = modal[1].time - modal[0].time;
    let tr = SpectralTransform::new(grid);
    let half = grid.max_m();
    let mut out = Vec::with_capacity(modal.len() - 2);
    for k in 1..modal.len() - 1 {
        let cur = &modal[k];
        let field = SpectralField {
            grid,
            coeffs: cur.coeffs.clone(),
            time: cur.time,
        };
        let sq = tr.square(&field);
        // cross term 2 C u as an x-convolution with the mean modes
        let mut cross = vec![Complex64::new(0.0, 0.0); grid.n_coeffs()];
        let has_mean = cur.mean.iter().any(|c| c.norm() > 0.0);
        if has_mean {
            for n in 1..=grid.ny as i64 {
                for m in -half..=half {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for mp in -half..=half {
                        let mq = m - mp;
                        if mq.abs() > half {
                            continue;
                        }
                        let cm = cur.mean[mp.rem_euclid(grid.nx as i64) as usize];
                        acc += cm * cur.coeffs[grid.index(mq, n).unwrap()];
                    }
                    cross[grid.index(m, n).unwrap()] = 2.0 * acc;
                }
            }
        }
        let mut res = 0.0;
        let mut terms = [0.0f64; 5];
        for idx in 0..grid.n_coeffs() {
            let (m, n) = grid.mode(idx);
            if m.abs() > half {
                continue;
            }
            let (mf, n2) = (m as f64, (n * n) as f64);
            let u = cur.coeffs[idx];
            let du = (modal[k + 1].coeffs[idx] - modal[k - 1].coeffs[idx]) / (2.0 * dt);
            let t_time = -n2 * du;
            let t_disp = Complex64::new(0.0, p.gamma() * mf.powi(3)) * u;
            let t_diff = -p.alpha() * n2 * n2 * u;
            let t_force = p.beta() * n2 * u;
            let t_nl = Complex64::new(0.0, -mf * n2) * (sq.coeffs[idx] + cross[idx]);
            let r = t_time + t_disp + t_diff + t_force + t_nl;
            res += r.norm_sqr();
            for (acc, t) in terms
                .iter_mut()
                .zip([t_time, t_disp, t_diff, t_force, t_nl])
            {
                *acc += t.norm_sqr();
            }
        }
        // n = 0 row: only the dispersive term of a non-constant mean survives
        let mut mean_res = 0.0;
        for m in -half..=half {
            let cm = cur.mean[m.rem_euclid(grid.nx as i64) as usize];
            let d = p.gamma() * (m as f64).powi(3) * cm.norm();
            mean_res += d * d;
        }
        // the n = 0 row carries half the L² weight of an n >= 1 row
        let res_norm = (MODE_WEIGHT * (res + 0.5 * mean_res)).sqrt();
        let scale: f64 = terms.iter().map(|t| (MODE_WEIGHT * t).sqrt()).sum::<f64>()
            + (0.5 * MODE_WEIGHT * mean_res).sqrt();
        out.push(if scale > 0.0 { res_norm / scale } else { 0.0 });
    }
    Ok(out)
}
