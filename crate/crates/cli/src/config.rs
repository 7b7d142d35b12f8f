//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hallbraid_core::solver::SolverConfig;
use hallbraid_core::{GridSpec, ModelParams};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Every key accepted in a config file (and shadowed by the matching flag).
pub const KEYS: &[&str] = &[
    "alpha",
    "beta",
    "gamma",
    "nx",
    "ny",
    "window",
    "nodes",
    "picard_tol",
    "picard_max_iter",
    "adapt_window",
    "record_interior",
    "t_end",
    "stride",
    "output_dir",
    "seed",
    "amplitude",
    "initial",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Scale of the synthetic initial condition (unused with `initial`).
    pub amplitude: f64,
    pub initial: Option<PathBuf>,
    /// Worker cap from `HALLBRAID_THREADS`, part of the config identity.
    pub threads: Option<usize>,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped, unknown or repeated keys are errors.
pub fn parse_kv(text: &str, path: &Path) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::parse(path, i + 1, format!("expected key = value, got {line:?}"))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::parse(path, i + 1, format!("unknown key {k:?}")));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::parse(
                path,
                i + 1,
                format!("key {k:?} given twice"),
            ));
        }
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> CliResult<T> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Config(format!("{key} = {v:?} is not a valid value"))),
    }
}

/// Reads `HALLBRAID_THREADS` (unset or empty means no cap).
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var("HALLBRAID_THREADS") {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "HALLBRAID_THREADS = {v:?} must be a positive integer"
            ))),
        },
    }
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>, threads: Option<usize>) -> CliResult<Self> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown key {k:?}")));
        }
        let d = SolverConfig::default();
        let model = ModelParams::new(
            get(map, "alpha", 1.0)?,
            get(map, "beta", 0.5)?,
            get(map, "gamma", 1.0)?,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let grid = GridSpec::new(get(map, "nx", 32)?, get(map, "ny", 32)?)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let solver = SolverConfig {
            window: get(map, "window", d.window)?,
            nodes_per_window: get(map, "nodes", d.nodes_per_window)?,
            picard_tol: get(map, "picard_tol", d.picard_tol)?,
            picard_max_iter: get(map, "picard_max_iter", d.picard_max_iter)?,
            adapt_window: get(map, "adapt_window", d.adapt_window)?,
            record_interior: get(map, "record_interior", d.record_interior)?,
        };
        solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let t_end: f64 = get(map, "t_end", 1.0)?;
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(CliError::Config(format!("t_end = {t_end} must be > 0")));
        }
        let snapshot_stride: usize = get(map, "stride", 1)?;
        if snapshot_stride == 0 {
            return Err(CliError::Config("stride must be >= 1".into()));
        }
        let amplitude: f64 = get(map, "amplitude", 0.1)?;
        if !amplitude.is_finite() {
            return Err(CliError::Config("amplitude must be finite".into()));
        }
        Ok(Self {
            model,
            grid,
            solver,
            t_end,
            snapshot_stride,
            output_dir: PathBuf::from(get(map, "output_dir", "hallbraid-out".to_string())?),
            seed: get(map, "seed", 0)?,
            amplitude,
            initial: map.get("initial").map(PathBuf::from),
            threads,
        })
    }

    /// Fully resolved settings, one sorted `key=value` per line; reals in
    /// shortest round-trip form. The initial-condition file enters by
    /// content hash rather than by path.
    pub fn canonical(&self) -> CliResult<String> {
        let s = &self.solver;
        let initial = match &self.initial {
            None => "none".to_string(),
            Some(p) => {
                let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
                format!("sha256:{:x}", Sha256::digest(&bytes))
            }
        };
        let mut lines = vec![
            format!("adapt_window={}", s.adapt_window),
            format!("alpha={:?}", self.model.alpha()),
            format!("amplitude={:?}", self.amplitude),
            format!("beta={:?}", self.model.beta()),
            format!("gamma={:?}", self.model.gamma()),
            format!("initial={initial}"),
            format!("nodes={}", s.nodes_per_window),
            format!("nx={}", self.grid.nx),
            format!("ny={}", self.grid.ny),
            format!("picard_max_iter={}", s.picard_max_iter),
            format!("picard_tol={:?}", s.picard_tol),
            format!("record_interior={}", s.record_interior),
            format!("seed={}", self.seed),
            format!("stride={}", self.snapshot_stride),
            format!("t_end={:?}", self.t_end),
            format!(
                "threads={}",
                self.threads.map_or("auto".to_string(), |n| n.to_string())
            ),
            format!("window={:?}", s.window),
        ];
        lines.sort();
        Ok(lines.join("\n") + "\n")
    }

    /// SHA-256 of [`RunConfig::canonical`], lowercase hex.
    pub fn hash(&self) -> CliResult<String> {
        Ok(format!(
            "{:x}",
            Sha256::digest(self.canonical()?.as_bytes())
        ))
    }
}
