use rayon::prelude::*;

use super::inner::InnerMethod;
use super::partition::{classify, Partition};
use super::sum::{kernel_sum_with, Breakdown, Truncation};
use super::{resonance_gap, WeightSpec};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Sup-scan settings. Each ladder rung truncates the lattice and, unless
/// `outer` is fixed, also bounds the scanned `1 <= m <= m_max`,
/// `1 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub ladder: Vec<Truncation>,
    /// Fixed outer `(m_max, n_max)`; `None` follows the rung.
    pub outer: Option<(i64, i64)>,
    /// Exponents `j` of the dyadic probes `tau = l + n^2 2^j`.
    pub dyadic: (i32, i32),
    pub method: InnerMethod,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            ladder: vec![Truncation::square(32), Truncation::square(64)],
            outer: None,
            dyadic: (-2, 12),
            method: InnerMethod::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub m: i64,
    pub n: i64,
    pub tau: f64,
    pub value: f64,
    pub breakdown: Breakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RungReport {
    pub trunc: Truncation,
    pub rows: Vec<ProbeRow>,
    /// Running maximum of `value` along `rows`.
    pub running_sup: Vec<f64>,
    pub sup: f64,
    /// Row index attaining `sup`.
    pub argmax: usize,
    pub all_finite: bool,
}

impl RungReport {
    pub fn sup_row(&self) -> &ProbeRow {
        &self.rows[self.argmax]
    }

    /// Largest per-partition contribution seen for each label.
    pub fn partition_sup(&self) -> Breakdown {
        let mut out = [0.0f64; 6];
        for r in &self.rows {
            for (o, v) in out.iter_mut().zip(r.breakdown) {
                *o = (*o).max(v);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub rungs: Vec<RungReport>,
    /// `|sup_k - sup_{k-1}| / sup_k` for consecutive rungs.
    pub plateau: Vec<f64>,
}

impl KernelReport {
    pub fn sup(&self) -> f64 {
        self.rungs.last().map_or(0.0, |r| r.sup)
    }

    /// Plateau metric between the last two rungs (0 for a single rung).
    pub fn last_plateau(&self) -> f64 {
        self.plateau.last().copied().unwrap_or(0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.rungs.iter().all(|r| r.all_finite)
    }
}

/// Probe times for `(m, n)`: `l + n^2 2^j`, `l` itself, and the resonance
/// values `l' + l''` of the near-diagonal interactions `(m, n +- 1)`,
/// `(m -+ 1, n +- 1)` and the `B0` line point `(0, 2n)`.
pub fn tau_probes(m: i64, n: i64, dyadic: (i32, i32), p: &ModelParams) -> Vec<f64> {
    let l = p.symbol(m, n);
    let n2 = (n * n) as f64;
    let mut out: Vec<f64> = (dyadic.0..=dyadic.1)
        .map(|j| l + n2 * 2f64.powi(j))
        .collect();
    out.push(l);
    for (mp, np) in [
        (m, n + 1),
        (m, n - 1),
        (m - 1, n + 1),
        (m + 1, n - 1),
        (0, 2 * n),
    ] {
        if np == 0 || np == n || 2 * np * n < n * n {
            continue;
        }
        out.push(p.symbol(mp, np) + p.symbol(m - mp, n - np));
    }
    out
}

/// Supremum of the kernel sum over `1 <= m <= m_max`, `1 <= n <= n_max`
/// and the probe times, for each truncation rung. `m <= 0` and `n < 0`
/// are covered by symmetry (`m = 0` gives 0; `(m, tau) -> (-m, -tau)` and
/// `n -> -n` leave the sum unchanged).
pub fn sup_scan(config: &ScanConfig, spec: &WeightSpec, p: &ModelParams) -> Result<KernelReport> {
    if config.ladder.is_empty() || config.ladder.iter().any(|r| r.m_max < 1 || r.n_max < 1) {
        return Err(Error::InvalidParams(
            "truncation ladder must hold positive rungs".into(),
        ));
    }
    let mut rungs = Vec::with_capacity(config.ladder.len());
    for &trunc in &config.ladder {
        let (mm, nn) = config.outer.unwrap_or((trunc.m_max, trunc.n_max));
        let points: Vec<(i64, i64)> = (1..=nn)
            .flat_map(|n| (1..=mm).map(move |m| (m, n)))
            .collect();
        let rows: Vec<ProbeRow> = points
            .par_iter()
            .flat_map_iter(|&(m, n)| {
                tau_probes(m, n, config.dyadic, p).into_iter().map(
                    move |tau| match kernel_sum_with(m, n, tau, trunc, spec, p, config.method) {
                        Ok(k) => ProbeRow {
                            m,
                            n,
                            tau,
                            value: k.total,
                            breakdown: k.breakdown,
                        },
                        Err(_) => ProbeRow {
                            m,
                            n,
                            tau,
                            value: f64::NAN,
                            breakdown: [f64::NAN; 6],
                        },
                    },
                )
            })
            .collect();
        let mut running_sup = Vec::with_capacity(rows.len());
        let mut sup = 0.0;
        let mut argmax = 0;
        let mut all_finite = true;
        for (i, row) in rows.iter().enumerate() {
            if !row.value.is_finite() {
                all_finite = false;
            } else if row.value > sup {
                sup = row.value;
                argmax = i;
            }
            running_sup.push(sup);
        }
        rungs.push(RungReport {
            trunc,
            rows,
            running_sup,
            sup,
            argmax,
            all_finite,
        });
    }
    let plateau = rungs
        .windows(2)
        .map(|w| (w[1].sup - w[0].sup).abs() / w[1].sup.max(f64::MIN_POSITIVE))
        .collect();
    Ok(KernelReport { rungs, plateau })
}

/// Empirical `min gap n^2 / (|gamma| k(n)^3 |m|^3)` over `T^c` tuples with
/// `1 <= m <= m_max`, `1 <= n <= n_max` in the truncated half-lattice.
/// `None` when no `T^c` tuple is found.
pub fn tc_gap_constant(
    m_max: i64,
    n_max: i64,
    trunc: Truncation,
    spec: &WeightSpec,
    p: &ModelParams,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for n in 1..=n_max {
        let k3 = spec.k(n).powi(3);
        for m in 1..=m_max {
            for np in 1..=trunc.n_max {
                if np == n || 2 * np < n || (n - np).abs() > trunc.n_max {
                    continue;
                }
                for mp in (m - trunc.m_max).max(-trunc.m_max)..=trunc.m_max.min(m + trunc.m_max) {
                    if classify(m, n, mp, np, spec)?.set != Partition::TComplement {
                        continue;
                    }
                    let gap = resonance_gap(m, n, mp, np, p)?;
                    let c = gap * (n * n) as f64 / (k3 * (m as f64).powi(3) * p.gamma().abs());
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
            }
        }
    }
    Ok(best)
}
