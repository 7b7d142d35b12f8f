use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hallbraid_core::diagnostics::energy_balance;
use hallbraid_core::solver::{solve, Trajectory};
use hallbraid_core::Error;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::initial::{load_initial_condition, synthetic, InitialCondition};
use crate::snapshot::{write_snapshot, Snapshot};

pub const LEDGER_FILE: &str = "ledger.tsv";
pub const PICARD_FILE: &str = "picard.log";

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.txt")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub config_hash: String,
    pub snapshots: Vec<PathBuf>,
    pub windows: usize,
    pub t_final: f64,
    pub max_balance_residual: f64,
    pub max_gronwall_margin: f64,
}

fn initial_condition(cfg: &RunConfig) -> CliResult<InitialCondition> {
    match &cfg.initial {
        None => Ok(InitialCondition {
            field: synthetic(cfg.grid, cfg.amplitude, cfg.seed),
            mean: 0.0,
        }),
        Some(path) => {
            let ic = load_initial_condition(path)?;
            let (g, want) = (ic.field.grid, cfg.grid);
            if (g.nx, g.ny) != (want.nx, want.ny) {
                return Err(CliError::Config(format!(
                    "initial condition is {}x{} but the config asks for {}x{}",
                    g.nx, g.ny, want.nx, want.ny
                )));
            }
            Ok(ic)
        }
    }
}

/// Solves, then writes every `stride`-th snapshot (and the last one), the
/// energy ledger and the Picard log. On a contraction failure the partial
/// trajectory is written before the error is returned.
pub fn run(cfg: &RunConfig) -> CliResult<RunSummary> {
    let hash = cfg.hash()?;
    let ic = initial_condition(cfg)?;
    if cfg.t_end <= ic.field.time {
        return Err(CliError::Config(format!(
            "t_end = {} does not exceed the initial time {}",
            cfg.t_end, ic.field.time
        )));
    }
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    match solve(&ic.field, cfg.t_end, &cfg.model, &cfg.solver) {
        Ok(traj) => write_outputs(cfg, &hash, &traj, ic.mean),
        Err(Error::ContractionFailure { report, partial }) => {
            if let Some(traj) = &partial {
                write_outputs(cfg, &hash, traj, ic.mean)?;
            }
            Err(Error::ContractionFailure { report, partial }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_outputs(
    cfg: &RunConfig,
    hash: &str,
    traj: &Trajectory,
    mean: f64,
) -> CliResult<RunSummary> {
    let dir = &cfg.output_dir;
    let last = traj.snapshots.len() - 1;
    let mut written = Vec::new();
    for (i, field) in traj.snapshots.iter().enumerate() {
        if i % cfg.snapshot_stride != 0 && i != last {
            continue;
        }
        let path = dir.join(snapshot_name(i));
        let snap = Snapshot {
            config_hash: hash.to_string(),
            params: cfg.model,
            mean,
            field: field.clone(),
        };
        write_snapshot(&path, &snap)?;
        written.push(path);
    }

    let ledger = energy_balance(traj);
    let mut text = format!(
        "# config_hash {hash}\nt\tenergy\tdissipation_cum\tbalance_residual\tgronwall_margin\n"
    );
    for i in 0..ledger.len() {
        let _ = writeln!(
            text,
            "{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
            ledger.times[i],
            ledger.energy[i],
            ledger.dissipation_cum[i],
            ledger.balance_residual[i],
            ledger.gronwall_margin[i]
        );
    }
    write_text(&dir.join(LEDGER_FILE), &text)?;

    let mut log =
        format!("# config_hash {hash}\nt_start\twindow\titerations\tresidual\tcontraction_ratio\n");
    for w in &traj.contraction_log {
        let _ = writeln!(
            log,
            "{:.16e}\t{:.16e}\t{}\t{:.6e}\t{:.6e}",
            w.t_start, w.window, w.iterations, w.residual, w.contraction_ratio
        );
    }
    write_text(&dir.join(PICARD_FILE), &log)?;

    Ok(RunSummary {
        config_hash: hash.to_string(),
        snapshots: written,
        windows: traj.contraction_log.len(),
        t_final: traj.last().time,
        max_balance_residual: ledger.max_relative_residual(),
        max_gronwall_margin: ledger
            .gronwall_margin
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
    })
}
