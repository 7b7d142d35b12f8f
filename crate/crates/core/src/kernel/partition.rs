use super::{k1, WeightSpec};
use crate::error::{Error, Result};

/// The six disjoint pieces of the half-lattice `{(m', n'): n'/n >= 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partition {
    /// `n' = 2n`.
    B0,
    /// `|m'| > 3|m|/2`.
    B1,
    /// `|eta| > k1(n)` and `|1 - eta| > k1(n)`.
    SComplement,
    /// Outside the thin set `T` around `eta = zeta` and `eta = g(zeta)`.
    TComplement,
    /// `|1 - eta| <= k1(n)` inside `T`.
    S1CapT,
    /// `|eta| <= k1(n)` inside `T`, `n' != 2n`.
    S0CapT,
}

impl Partition {
    pub const ALL: [Partition; 6] = [
        Partition::B0,
        Partition::B1,
        Partition::SComplement,
        Partition::TComplement,
        Partition::S1CapT,
        Partition::S0CapT,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Partition::B0 => "B0",
            Partition::B1 => "B1",
            Partition::SComplement => "S_c",
            Partition::TComplement => "T_c",
            Partition::S1CapT => "S1capT",
            Partition::S0CapT => "S0capT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionLabel {
    pub set: Partition,
    /// `m'/m` (`NaN` when `m = 0`).
    pub eta: f64,
    /// `n'/n`.
    pub zeta: f64,
}

/// Label of `(m', n')` relative to `(m, n)`. Precedence: `B0`, `B1`,
/// `S^c`, `T^c`, `S1 cap T`, `S0 cap T`.
///
/// Tuples outside the half-lattice (`n' = 0`, `n' = n` or `n'/n < 1/2`)
/// are rejected, and so is `m = 0` off the `B0` line since `eta` is then
/// undefined.
pub fn classify(m: i64, n: i64, mp: i64, np: i64, spec: &WeightSpec) -> Result<PartitionLabel> {
    if n == 0 || np == 0 || np == n {
        return Err(Error::Domain(format!(
            "(m', n') = ({mp}, {np}) is not in the lattice for n = {n}"
        )));
    }
    // n'/n >= 1/2  <=>  2 n' n >= n^2
    if 2 * np * n < n * n {
        return Err(Error::Domain(format!("n'/n = {np}/{n} is below 1/2")));
    }
    let zeta = np as f64 / n as f64;
    let eta = if m == 0 {
        f64::NAN
    } else {
        mp as f64 / m as f64
    };
    if m == 0 && np != 2 * n {
        return Err(Error::Domain("eta = m'/m is undefined for m = 0".into()));
    }
    let set = label_in_half(m, n, mp, np, spec.k(n), k1(n));
    Ok(PartitionLabel { set, eta, zeta })
}

/// Label for a tuple already known to lie in the half-lattice, with
/// `k(n)` and `k1(n)` precomputed.
pub(crate) fn label_in_half(m: i64, n: i64, mp: i64, np: i64, k: f64, k1: f64) -> Partition {
    if np == 2 * n {
        return Partition::B0;
    }
    if 2 * mp.unsigned_abs() > 3 * m.unsigned_abs() {
        return Partition::B1;
    }
    let eta = mp as f64 / m as f64;
    let zeta = np as f64 / n as f64;
    if eta.abs() > k1 && (1.0 - eta).abs() > k1 {
        return Partition::SComplement;
    }
    let in_t =
        ((2.0 * zeta - 1.0) * eta - zeta * (2.0 - zeta)).abs() <= k || (eta - zeta).abs() <= k;
    if !in_t {
        Partition::TComplement
    } else if (1.0 - eta).abs() <= k1 {
        Partition::S1CapT
    } else {
        Partition::S0CapT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> WeightSpec {
        WeightSpec::new(2.6, 0.55, 0.6).unwrap()
    }

    #[test]
    fn b0_regardless_of_m() {
        for mp in -20..=20 {
            assert_eq!(classify(3, 2, mp, 4, &spec()).unwrap().set, Partition::B0);
        }
        assert_eq!(classify(0, 2, 5, 4, &spec()).unwrap().set, Partition::B0);
    }

    #[test]
    fn b1_when_m_doubles() {
        assert_eq!(classify(4, 3, 8, 4, &spec()).unwrap().set, Partition::B1);
        assert_eq!(classify(-4, 3, 8, 4, &spec()).unwrap().set, Partition::B1);
    }

    #[test]
    fn s_complement_interior() {
        // eta = 0.5, zeta = 0.75
        let l = classify(4, 4, 2, 3, &spec()).unwrap();
        assert_eq!(l.set, Partition::SComplement);
        assert_eq!((l.eta, l.zeta), (0.5, 0.75));
    }

    #[test]
    fn domain_errors() {
        let s = spec();
        assert!(classify(1, 4, 0, 1, &s).is_err());
        assert!(classify(1, 4, 0, 0, &s).is_err());
        assert!(classify(1, 4, 0, 4, &s).is_err());
        assert!(classify(0, 4, 1, 3, &s).is_err());
        assert!(classify(1, 4, 0, 2, &s).is_ok());
        assert!(classify(1, -4, 0, -2, &s).is_ok());
        assert!(classify(1, -4, 0, 2, &s).is_err());
    }
}
