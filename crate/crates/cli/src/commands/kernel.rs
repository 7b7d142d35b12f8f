use std::fmt::Write as _;

use hallbraid_core::kernel::{
    check_appendix_lemmas, sup_scan, tc_gap_constant, InnerMethod, KernelReport, LemmaGrids,
    LemmaReport, Partition, ScanConfig, Truncation, WeightSpec,
};
use hallbraid_core::ModelParams;

use crate::error::{CliError, CliResult};

/// Largest tolerated relative change of a lemma maximum under refinement.
pub const LEMMA_STABILITY: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelArgs {
    pub s: f64,
    pub b: f64,
    pub bprime: f64,
    pub gamma: f64,
    /// Top rung of the truncation ladder.
    pub m_max: i64,
    pub n_max: i64,
    /// Number of rungs; each one below the top halves `(m_max, n_max)`.
    pub rungs: usize,
    /// Dyadic exponents of the probes `tau = l + n^2 2^j`.
    pub tau_probes: (i32, i32),
    pub threshold: f64,
    pub override_exponents: bool,
}

impl Default for KernelArgs {
    fn default() -> Self {
        Self {
            s: 2.6,
            b: 0.55,
            bprime: 0.6,
            gamma: 1.0,
            m_max: 32,
            n_max: 32,
            rungs: 2,
            tau_probes: (-2, 12),
            threshold: 0.05,
            override_exponents: false,
        }
    }
}

/// Parses `LO:HI` into an ordered pair of dyadic exponents.
pub fn parse_probe_range(s: &str) -> CliResult<(i32, i32)> {
    let bad = || {
        CliError::Config(format!(
            "--tau-probes {s:?} must look like LO:HI with LO <= HI"
        ))
    };
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi || lo < -60 || hi > 60 {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn weight_spec(s: f64, b: f64, bprime: f64, override_exponents: bool) -> CliResult<WeightSpec> {
    let spec = if override_exponents {
        WeightSpec::exploratory(s, b, bprime)
    } else {
        WeightSpec::new(s, b, bprime)
    };
    spec.map_err(|e| CliError::Config(e.to_string()))
}

impl KernelArgs {
    pub fn ladder(&self) -> CliResult<Vec<Truncation>> {
        if self.rungs == 0 || self.rungs > 16 {
            return Err(CliError::Config(format!(
                "--rungs {} must lie in 1..=16",
                self.rungs
            )));
        }
        if self.m_max < 1 || self.n_max < 1 {
            return Err(CliError::Config("--mmax and --nmax must be >= 1".into()));
        }
        let mut ladder: Vec<Truncation> = (0..self.rungs)
            .rev()
            .map(|k| Truncation {
                m_max: (self.m_max >> k).max(1),
                n_max: (self.n_max >> k).max(1),
            })
            .collect();
        ladder.dedup();
        Ok(ladder)
    }

    pub fn scan_config(&self) -> CliResult<ScanConfig> {
        Ok(ScanConfig {
            ladder: self.ladder()?,
            outer: None,
            dyadic: self.tau_probes,
            method: InnerMethod::ClosedForm,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelOutcome {
    pub report: KernelReport,
    /// Tab-separated probe and partition tables.
    pub table: String,
    pub summary: String,
    /// Smallest `gap n^2 / (|gamma| k(n)^3 |m|^3)` over `T_c` tuples of the
    /// top rung.
    pub tc_gap_min: Option<f64>,
    /// `b' = b`, reported apart from the interior exponents.
    pub endpoint: bool,
    pub passed: bool,
}

pub fn verify_kernel(args: &KernelArgs) -> CliResult<KernelOutcome> {
    let spec = weight_spec(args.s, args.b, args.bprime, args.override_exponents)?;
    let params =
        ModelParams::new(1.0, 0.0, args.gamma).map_err(|e| CliError::Config(e.to_string()))?;
    if !(args.threshold >= 0.0) {
        return Err(CliError::Config(format!(
            "--threshold {} must be >= 0",
            args.threshold
        )));
    }
    let config = args.scan_config()?;
    let report = sup_scan(&config, &spec, &params)?;
    let top = *config.ladder.last().expect("ladder is never empty");
    let tc_gap_min = tc_gap_constant(top.m_max, top.n_max, top, &spec, &params)?;
    let table = format_kernel_report(&report);
    let sup = report.sup();
    let plateau = report.last_plateau();
    let passed = report.all_finite() && sup.is_finite() && plateau <= args.threshold;
    Ok(KernelOutcome {
        summary: format!("sup={sup:.10e} plateau={plateau:.6e}"),
        report,
        table,
        tc_gap_min,
        endpoint: spec.is_endpoint(),
        passed,
    })
}

pub fn format_kernel_report(report: &KernelReport) -> String {
    let mut out = String::from("# probes\nrung_mmax\trung_nmax\tm\tn\ttau\tvalue");
    for p in Partition::ALL {
        let _ = write!(out, "\t{}", p.name());
    }
    out.push('\n');
    for rung in &report.rungs {
        for row in &rung.rows {
            let _ = write!(
                out,
                "{}\t{}\t{}\t{}\t{:.10e}\t{:.10e}",
                rung.trunc.m_max, rung.trunc.n_max, row.m, row.n, row.tau, row.value
            );
            for v in row.breakdown {
                let _ = write!(out, "\t{v:.6e}");
            }
            out.push('\n');
        }
    }
    out.push_str("# partitions\nrung_mmax\trung_nmax\tpartition\tsup_contribution\n");
    for rung in &report.rungs {
        let sups = rung.partition_sup();
        for p in Partition::ALL {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.10e}",
                rung.trunc.m_max,
                rung.trunc.n_max,
                p.name(),
                sups[p.index()]
            );
        }
    }
    out.push_str("# rungs\nrung_mmax\trung_nmax\tsup\targmax_m\targmax_n\targmax_tau\tplateau\n");
    for (k, rung) in report.rungs.iter().enumerate() {
        let row = rung.sup_row();
        let plateau = if k == 0 {
            "-".to_string()
        } else {
            format!("{:.6e}", report.plateau[k - 1])
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{:.10e}\t{}\t{}\t{:.10e}\t{plateau}",
            rung.trunc.m_max, rung.trunc.n_max, rung.sup, row.m, row.n, row.tau
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaArgs {
    pub s: f64,
    pub b: f64,
    pub bprime: f64,
    pub grid_density: usize,
    pub tol: f64,
    pub override_exponents: bool,
}

impl Default for LemmaArgs {
    fn default() -> Self {
        let g = LemmaGrids::default();
        Self {
            s: 2.6,
            b: 0.55,
            bprime: 0.6,
            grid_density: g.density,
            tol: g.tol,
            override_exponents: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOutcome {
    pub report: LemmaReport,
    pub table: String,
    pub passed: bool,
}

pub fn check_lemmas(args: &LemmaArgs) -> CliResult<LemmaOutcome> {
    let spec = weight_spec(args.s, args.b, args.bprime, args.override_exponents)?;
    if args.grid_density == 0 || !(args.tol > 0.0) {
        return Err(CliError::Config(
            "--grid-density must be >= 1 and --tol > 0".into(),
        ));
    }
    let report = check_appendix_lemmas(
        &spec,
        LemmaGrids {
            density: args.grid_density,
            tol: args.tol,
        },
    )?;
    let table = format_lemma_report(&report);
    let passed = report.is_stable(LEMMA_STABILITY);
    Ok(LemmaOutcome {
        report,
        table,
        passed,
    })
}

pub fn format_lemma_report(report: &LemmaReport) -> String {
    let mut out = String::new();
    for s in &report.sections {
        let c = s.columns;
        let _ = writeln!(out, "# lemma {}", s.name);
        let _ = writeln!(out, "{}\t{}\t{}\t{}\tratio", c[0], c[1], c[2], c[3]);
        for r in &s.rows {
            let p = r.params;
            let _ = writeln!(
                out,
                "{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.12e}",
                p[0], p[1], p[2], p[3], r.ratio
            );
        }
        let _ = writeln!(
            out,
            "max={:.10e} refined_max={:.10e} rel_change={:.3e} stable={}",
            s.max_ratio,
            s.refined_max,
            s.rel_change,
            s.is_stable(LEMMA_STABILITY)
        );
    }
    out
}
