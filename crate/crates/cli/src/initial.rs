//! Initial data: a snapshot file, a grid-sample table, or seeded synthetic
//! modes.

use std::path::Path;

use hallbraid_core::{
    enforce_symmetry, Error, GridSpec, PhysicalField, SpectralField, SpectralTransform,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::snapshot::{parse_snapshot, FORMAT_TAG};

/// Largest tolerated variation of the removed y-mean across `x`.
pub const MEAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub field: SpectralField,
    /// The constant y-mean `C0` that was split off.
    pub mean: f64,
}

/// Dispatches on the first non-blank line: the snapshot tag, or else a
/// table of `x y value` rows.
pub fn load_initial_condition(path: &Path) -> CliResult<InitialCondition> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.trim() == FORMAT_TAG {
        let snap = parse_snapshot(&text, path)?;
        Ok(InitialCondition {
            field: snap.field,
            mean: snap.mean,
        })
    } else {
        parse_grid_table(&text, path)
    }
}

/// Distinct sorted coordinates, merging values closer than `tol`.
fn distinct(values: &mut Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for &v in values.iter() {
        if out.last().is_none_or(|l| v - l > tol) {
            out.push(v);
        }
    }
    out
}

/// Samples `x_i = 2 pi i / nx`, `y_j = pi j / ny` (`j = 0..=ny`), one
/// `x y value` row each, any order; `#` lines are comments.
pub fn parse_grid_table(text: &str, path: &Path) -> CliResult<InitialCondition> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(CliError::parse(path, i + 1, "expected `x y value`"));
        }
        let mut v = [0.0f64; 3];
        for (slot, s) in v.iter_mut().zip(&parts) {
            *slot = s
                .parse()
                .map_err(|_| CliError::parse(path, i + 1, format!("cannot parse {s:?}")))?;
            if !slot.is_finite() {
                return Err(CliError::parse(path, i + 1, "non-finite entry"));
            }
        }
        rows.push((i + 1, v));
    }
    let tol = 1e-9;
    let xs = distinct(&mut rows.iter().map(|r| r.1[0]).collect(), tol);
    let ys = distinct(&mut rows.iter().map(|r| r.1[1]).collect(), tol);
    if ys.len() < 2 {
        return Err(CliError::parse(
            path,
            0,
            "need at least two distinct y values",
        ));
    }
    let grid = GridSpec::new(xs.len(), ys.len() - 1)?;
    let stride = grid.ny + 1;
    if rows.len() != grid.nx * stride {
        return Err(CliError::parse(
            path,
            0,
            format!("{} rows for a {}x{} grid", rows.len(), grid.nx, stride),
        ));
    }
    let mut values = vec![f64::NAN; grid.nx * stride];
    for (line, [x, y, v]) in rows {
        let i = (x / (2.0 * std::f64::consts::PI) * grid.nx as f64).round();
        let j = (y / std::f64::consts::PI * grid.ny as f64).round();
        let on_grid = i >= 0.0
            && (i as usize) < grid.nx
            && j >= 0.0
            && (j as usize) <= grid.ny
            && (grid.x(i as usize) - x).abs() <= tol
            && (grid.y(j as usize) - y).abs() <= tol;
        if !on_grid {
            return Err(CliError::parse(
                path,
                line,
                format!("({x}, {y}) is not a grid point"),
            ));
        }
        let slot = &mut values[i as usize * stride + j as usize];
        if !slot.is_nan() {
            return Err(CliError::parse(
                path,
                line,
                format!("({x}, {y}) given twice"),
            ));
        }
        *slot = v;
    }
    from_samples(PhysicalField::new(grid, values, 0.0)?)
}

/// Splits off the y-mean, which must be the same for every `x`.
pub fn from_samples(f: PhysicalField) -> CliResult<InitialCondition> {
    let (field, mean) = SpectralTransform::new(f.grid).forward_with_mean(&f)?;
    let c0 = mean.iter().sum::<f64>() / mean.len() as f64;
    let spread = mean.iter().map(|m| (m - c0).abs()).fold(0.0, f64::max);
    if spread > MEAN_TOL {
        return Err(Error::MeanMode(format!(
            "y-mean varies with x by {spread:.3e} (tolerance {MEAN_TOL:e})"
        ))
        .into());
    }
    Ok(InitialCondition {
        field: enforce_symmetry(&field),
        mean: c0,
    })
}

/// Seeded random modes `0 <= m <= 4`, `1 <= n <= 4` with amplitude
/// `amplitude / (1 + m^2 + n^2)`.
pub fn synthetic(grid: GridSpec, amplitude: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    let top_m = grid.max_m().min(4);
    for n in 1..=(grid.ny as i64).min(4) {
        for m in 0..=top_m {
            let scale = amplitude / (1 + m * m + n * n) as f64;
            let re = rng.gen_range(-1.0..1.0) * scale;
            let im = if m == 0 {
                0.0
            } else {
                rng.gen_range(-1.0..1.0) * scale
            };
            modes.push((m, n, Complex64::new(re, im)));
        }
    }
    SpectralField::from_modes(grid, &modes, 0.0).expect("modes lie inside the grid")
}
