use std::fmt::Write as _;
use std::path::Path;

use hallbraid_core::diagnostics::{energy_balance, pde_residual};
use hallbraid_core::solver::{SolverConfig, Trajectory};

use crate::error::{CliError, CliResult};
use crate::snapshot::{read_snapshot, Snapshot};

/// Tolerated `|c_{-m,n} - conj(c_{m,n})|` relative to `max |c|`.
pub const SYMMETRY_TOL: f64 = 1e-13;
/// Tolerated relative excess over the exponential energy bound.
pub const GRONWALL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseRow {
    pub time: f64,
    pub energy: f64,
    pub gronwall_margin: f64,
    pub balance_residual: f64,
    pub symmetry_defect: f64,
    /// PDE residual; `None` at the ends or when spacing is not uniform.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseReport {
    pub rows: Vec<DiagnoseRow>,
    pub table: String,
}

impl DiagnoseReport {
    pub fn max_gronwall_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.gronwall_margin)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_symmetry_defect(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.symmetry_defect)
            .fold(0.0, f64::max)
    }
}

/// Loads every `snap_*.txt` in `dir`, ordered by time.
pub fn load_trajectory(dir: &Path) -> CliResult<Vec<Snapshot>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut snaps = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("snap_") && name.ends_with(".txt") {
            snaps.push(read_snapshot(&path)?);
        }
    }
    if snaps.is_empty() {
        return Err(CliError::Config(format!(
            "no snap_*.txt files in {}",
            dir.display()
        )));
    }
    snaps.sort_by(|a, b| a.field.time.total_cmp(&b.field.time));
    let first = &snaps[0];
    for s in &snaps[1..] {
        if s.config_hash != first.config_hash
            || s.params != first.params
            || s.field.grid != first.field.grid
        {
            return Err(CliError::Config(format!(
                "{} mixes snapshots from different runs",
                dir.display()
            )));
        }
    }
    Ok(snaps)
}

/// Energy ledger, Grönwall margin, symmetry defect and (for uniformly
/// spaced snapshots) the PDE residual of a stored trajectory.
pub fn diagnose(dir: &Path) -> CliResult<DiagnoseReport> {
    let snaps = load_trajectory(dir)?;
    let params = snaps[0].params;
    let traj = Trajectory {
        snapshots: snaps.iter().map(|s| s.field.clone()).collect(),
        params,
        config: SolverConfig::default(),
        contraction_log: Vec::new(),
    };
    let ledger = energy_balance(&traj);
    let residual = pde_residual(&traj, &params).ok();
    let mut rows = Vec::with_capacity(snaps.len());
    for (i, s) in snaps.iter().enumerate() {
        let scale = s.field.max_abs();
        let defect = if scale > 0.0 {
            s.field.symmetry_defect() / scale
        } else {
            0.0
        };
        let res = residual.as_ref().and_then(|r| {
            if i == 0 || i + 1 == snaps.len() {
                None
            } else {
                r.get(i - 1).copied()
            }
        });
        rows.push(DiagnoseRow {
            time: s.field.time,
            energy: ledger.energy[i],
            gronwall_margin: ledger.gronwall_margin[i],
            balance_residual: ledger.balance_residual[i]
                / ledger.energy_scale().max(f64::MIN_POSITIVE),
            symmetry_defect: defect,
            residual: res,
        });
    }
    let mut table =
        String::from("t\tenergy\tgronwall_margin\tbalance_rel\tsymmetry_defect\tpde_residual\n");
    for r in &rows {
        let res = r.residual.map_or("-".to_string(), |v| format!("{v:.6e}"));
        let _ = writeln!(
            table,
            "{:.10e}\t{:.10e}\t{:.3e}\t{:.3e}\t{:.3e}\t{res}",
            r.time, r.energy, r.gronwall_margin, r.balance_residual, r.symmetry_defect
        );
    }
    Ok(DiagnoseReport { rows, table })
}

/// Fails when a snapshot breaks the Grönwall bound or the coefficient
/// symmetry.
pub fn check(report: &DiagnoseReport) -> CliResult<()> {
    let g = report.max_gronwall_margin();
    if g > GRONWALL_TOL {
        return Err(CliError::Verification(format!(
            "Grönwall margin {g:.3e} exceeds {GRONWALL_TOL:e}"
        )));
    }
    let s = report.max_symmetry_defect();
    if s > SYMMETRY_TOL {
        return Err(CliError::Verification(format!(
            "symmetry defect {s:.3e} exceeds {SYMMETRY_TOL:e}"
        )));
    }
    Ok(())
}
