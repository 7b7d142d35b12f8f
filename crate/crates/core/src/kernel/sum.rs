use super::inner::{two_kink_integral_adaptive, InnerMethod, PowerPair};
use super::partition::{label_in_half, Partition};
use super::WeightSpec;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Symmetric box truncation of the interaction lattice:
/// `|m'|, |m - m'| <= m_max` and `1 <= |n'|, |n - n'| <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub m_max: i64,
    pub n_max: i64,
}

impl Truncation {
    pub fn square(r: i64) -> Self {
        Self { m_max: r, n_max: r }
    }
}

/// Per-partition contributions, indexed by [`Partition::index`].
pub type Breakdown = [f64; 6];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSum {
    pub total: f64,
    pub breakdown: Breakdown,
    /// Number of half-lattice tuples visited.
    pub terms: usize,
}

/// Everything about `(m, n, tau)` that the summands share.
pub(crate) struct Outer<'a> {
    m: i64,
    n: i64,
    tau: f64,
    prefactor: f64,
    k: f64,
    k1: f64,
    p: &'a ModelParams,
    /// `rho` as a function of `|m'| + |n'|`.
    rho_table: Vec<f64>,
}

impl<'a> Outer<'a> {
    pub(crate) fn new(
        m: i64,
        n: i64,
        tau: f64,
        trunc: Truncation,
        spec: &'a WeightSpec,
        p: &'a ModelParams,
    ) -> Self {
        let nf = n.unsigned_abs() as f64;
        let l = p.symbol(m, n);
        let prefactor = (m as f64).powi(2)
            * super::rho(m, n, spec.s())
            * (nf * nf + (tau - l).abs()).powf(2.0 * spec.bprime() - 2.0);
        let len = (2 * (trunc.m_max + trunc.n_max) + 2) as usize;
        let rho_table = (0..len).map(|k| (k as f64).powf(2.0 * spec.s())).collect();
        Self {
            m,
            n,
            tau,
            prefactor,
            k: spec.k(n),
            k1: super::k1(n),
            p,
            rho_table,
        }
    }

    /// `m^2 W_{m,n}(tau; b') / ((n^2 + |tau - l|)^2 W' W'')` integrated in
    /// `tau1`, for one lattice point.
    fn term(
        &self,
        mp: i64,
        np: i64,
        inner: &mut dyn FnMut(f64, f64, f64) -> Result<f64>,
    ) -> Result<f64> {
        let (m, n) = (self.m, self.n);
        let (mq, nq) = (m - mp, n - np);
        let rp = self.rho_table[(mp.unsigned_abs() + np.unsigned_abs()) as usize];
        let rq = self.rho_table[(mq.unsigned_abs() + nq.unsigned_abs()) as usize];
        let d = self.tau - self.p.symbol(mp, np) - self.p.symbol(mq, nq);
        let a = (np * np) as f64;
        let c = (nq * nq) as f64;
        let i = inner(a, c, d)?;
        Ok(self.prefactor * i / (rp * rq))
    }
}

/// One summand of the kernel sum with its `tau1`-integral, for the full
/// lattice point `(m', n')` (no half-lattice folding).
pub fn summand(
    m: i64,
    n: i64,
    tau: f64,
    mp: i64,
    np: i64,
    spec: &WeightSpec,
    p: &ModelParams,
    method: InnerMethod,
) -> Result<f64> {
    if n == 0 || np == 0 || np == n {
        return Err(Error::Domain(format!(
            "({mp}, {np}) is not in the lattice for n = {n}"
        )));
    }
    let r = (m.abs() + mp.abs()).max(n.abs() + np.abs()) + 1;
    let outer = Outer::new(m, n, tau, Truncation::square(r), spec, p);
    let mut inner = inner_fn(method, 2.0 * spec.b());
    outer.term(mp, np, &mut *inner)
}

fn inner_fn(method: InnerMethod, pexp: f64) -> Box<dyn FnMut(f64, f64, f64) -> Result<f64>> {
    match method {
        InnerMethod::ClosedForm => {
            let pp = PowerPair::new(pexp);
            Box::new(move |a, c, d| Ok(pp.integral(a, c, d)))
        }
        InnerMethod::Adaptive(tol) => {
            Box::new(move |a, c, d| two_kink_integral_adaptive(a, c, d, pexp, tol))
        }
    }
}

/// Kernel sum with the inner integrals by adaptive quadrature.
pub fn kernel_sum(
    m: i64,
    n: i64,
    tau: f64,
    trunc: Truncation,
    spec: &WeightSpec,
    p: &ModelParams,
) -> Result<KernelSum> {
    kernel_sum_with(
        m,
        n,
        tau,
        trunc,
        spec,
        p,
        InnerMethod::Adaptive(Default::default()),
    )
}

/// Kernel sum over the truncated lattice `Z^2_{0,n}`.
///
/// The summand is invariant under `(m', n', tau1) -> (m - m', n - n', tau - tau1)`,
/// which maps `n'/n < 1/2` onto `n'/n > 1/2`; the sum is therefore taken
/// over the half-lattice `n'/n >= 1/2` with weight 2 off the line
/// `2n' = n`, and each tuple's contribution is attributed to its partition
/// label there.
pub fn kernel_sum_with(
    m: i64,
    n: i64,
    tau: f64,
    trunc: Truncation,
    spec: &WeightSpec,
    p: &ModelParams,
    method: InnerMethod,
) -> Result<KernelSum> {
    if n == 0 {
        return Err(Error::Domain("kernel sum needs n != 0".into()));
    }
    if trunc.m_max < 0 || trunc.n_max < 1 {
        return Err(Error::InvalidParams(
            "truncation bounds must be positive".into(),
        ));
    }
    let mut breakdown = [0.0; 6];
    if m == 0 {
        return Ok(KernelSum {
            total: 0.0,
            breakdown,
            terms: 0,
        });
    }
    let outer = Outer::new(m, n, tau, trunc, spec, p);
    let mut inner = inner_fn(method, 2.0 * spec.b());
    let mut terms = 0;
    let (mlo, mhi) = (
        (-trunc.m_max).max(m - trunc.m_max),
        trunc.m_max.min(m + trunc.m_max),
    );
    for np in -trunc.n_max..=trunc.n_max {
        if np == 0 || np == n || (n - np).abs() > trunc.n_max || 2 * np * n < n * n {
            continue;
        }
        let fold = if 2 * np == n { 1.0 } else { 2.0 };
        let mut row = [0.0; 6];
        for mp in mlo..=mhi {
            let label = label_in_half(m, n, mp, np, outer.k, outer.k1);
            let t = outer.term(mp, np, &mut *inner)?;
            if !t.is_finite() {
                return Err(Error::Quadrature(format!(
                    "non-finite summand at (m', n') = ({mp}, {np})"
                )));
            }
            row[label.index()] += fold * t;
            terms += 1;
        }
        for (acc, r) in breakdown.iter_mut().zip(row) {
            *acc += r;
        }
    }
    let total = breakdown.iter().sum();
    Ok(KernelSum {
        total,
        breakdown,
        terms,
    })
}

impl KernelSum {
    pub fn part(&self, label: Partition) -> f64 {
        self.breakdown[label.index()]
    }
}
