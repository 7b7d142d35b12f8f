use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hallbraid::commands::diagnose::{check, diagnose};
use hallbraid::commands::kernel::{
    check_lemmas, parse_probe_range, verify_kernel, KernelArgs, LemmaArgs,
};
use hallbraid::commands::run::run;
use hallbraid::config::{parse_kv, thread_cap, RunConfig};
use hallbraid::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "hallbraid",
    version,
    about = "Hall river-braiding simulator and kernel verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate from initial data and write snapshots, the energy ledger and the Picard log.
    Run(RunArgs),
    /// Sup-scan of the bilinear kernel over a truncation ladder.
    VerifyKernel(VerifyArgs),
    /// Ratio tables for the appendix inequalities.
    CheckLemmas(CheckArgs),
    /// Re-derive the diagnostics of a stored trajectory.
    Diagnose { dir: PathBuf },
}

/// Every flag overrides the config-file key of the same name.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    picard_tol: Option<String>,
    #[arg(long)]
    picard_max_iter: Option<String>,
    #[arg(long)]
    adapt_window: Option<String>,
    #[arg(long)]
    record_interior: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    /// Snapshot file or `x y value` grid table.
    #[arg(long)]
    initial: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 17] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("nx", &self.nx),
            ("ny", &self.ny),
            ("window", &self.window),
            ("nodes", &self.nodes),
            ("picard_tol", &self.picard_tol),
            ("picard_max_iter", &self.picard_max_iter),
            ("adapt_window", &self.adapt_window),
            ("record_interior", &self.record_interior),
            ("t_end", &self.t_end),
            ("stride", &self.stride),
            ("output_dir", &self.output_dir),
            ("seed", &self.seed),
            ("amplitude", &self.amplitude),
            ("initial", &self.initial),
        ]
    }

    fn resolve(&self, threads: Option<usize>) -> CliResult<RunConfig> {
        let mut map = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_kv(&text, path)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        RunConfig::from_map(&map, threads)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2.6)]
    s: f64,
    #[arg(long, default_value_t = 0.55)]
    b: f64,
    #[arg(long, default_value_t = 0.6)]
    bprime: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Truncation of the top rung in `m`.
    #[arg(long, default_value_t = 32)]
    mmax: i64,
    /// Truncation of the top rung in `n` (defaults to `--mmax`).
    #[arg(long)]
    nmax: Option<i64>,
    /// Rungs in the ladder; each lower rung halves the truncation.
    #[arg(long, default_value_t = 2)]
    rungs: usize,
    /// Dyadic exponents `LO:HI` of the probes `tau = l + n^2 2^j`.
    #[arg(long, default_value = "-2:12", allow_hyphen_values = true)]
    tau_probes: String,
    /// Largest accepted relative change between the last two rungs.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    #[arg(long, default_value = "kernel_report.tsv")]
    report: PathBuf,
    /// Skip the admissible-exponent window.
    #[arg(long)]
    override_exponents: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 2.6)]
    s: f64,
    #[arg(long, default_value_t = 0.55)]
    b: f64,
    #[arg(long, default_value_t = 0.6)]
    bprime: f64,
    /// Grid points per decade.
    #[arg(long, default_value_t = 4)]
    grid_density: usize,
    /// Base quadrature tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    override_exponents: bool,
}

fn write_report(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn execute(cli: Cli, threads: Option<usize>) -> CliResult<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve(threads)?;
            let summary = run(&cfg)?;
            println!(
                "config_hash={} snapshots={} windows={} t={} max_balance_residual={:.3e} max_gronwall_margin={:.3e}",
                summary.config_hash,
                summary.snapshots.len(),
                summary.windows,
                summary.t_final,
                summary.max_balance_residual,
                summary.max_gronwall_margin
            );
            Ok(())
        }
        Command::VerifyKernel(a) => {
            let args = KernelArgs {
                s: a.s,
                b: a.b,
                bprime: a.bprime,
                gamma: a.gamma,
                m_max: a.mmax,
                n_max: a.nmax.unwrap_or(a.mmax),
                rungs: a.rungs,
                tau_probes: parse_probe_range(&a.tau_probes)?,
                threshold: a.threshold,
                override_exponents: a.override_exponents,
            };
            let out = verify_kernel(&args)?;
            write_report(&a.report, &out.table)?;
            for rung in &out.report.rungs {
                let sups = rung.partition_sup();
                let parts: Vec<String> = hallbraid_core::kernel::Partition::ALL
                    .iter()
                    .map(|p| format!("{}={:.3e}", p.name(), sups[p.index()]))
                    .collect();
                println!(
                    "rung {}x{}: sup={:.6e} {}",
                    rung.trunc.m_max,
                    rung.trunc.n_max,
                    rung.sup,
                    parts.join(" ")
                );
            }
            match out.tc_gap_min {
                Some(c) => println!("tc_gap_min={c:.6e}"),
                None => println!("tc_gap_min=none (no T_c tuples)"),
            }
            if out.endpoint {
                println!("note: b' = b endpoint; the kernel bound admits it but the bilinear estimate needs b' > b");
            }
            println!("{}", out.summary);
            if out.passed {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "plateau above {} or non-finite inner sums",
                    args.threshold
                )))
            }
        }
        Command::CheckLemmas(a) => {
            let args = LemmaArgs {
                s: a.s,
                b: a.b,
                bprime: a.bprime,
                grid_density: a.grid_density,
                tol: a.tol,
                override_exponents: a.override_exponents,
            };
            let out = check_lemmas(&args)?;
            print!("{}", out.table);
            if out.passed {
                Ok(())
            } else {
                Err(CliError::Verification(
                    "a lemma maximum moved by more than 2% under refinement".into(),
                ))
            }
        }
        Command::Diagnose { dir } => {
            let report = diagnose(&dir)?;
            print!("{}", report.table);
            check(&report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_cap().and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
        execute(cli, threads)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hallbraid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
