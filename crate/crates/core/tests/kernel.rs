use hallbraid_core::kernel::{
    classify, kernel_sum, kernel_sum_with, resonance_defect, resonance_f, resonance_gap,
    resonance_gap_factored, rho, summand, tc_gap_constant, InnerMethod, Partition, Truncation,
    WeightSpec,
};
use hallbraid_core::quadrature::Tolerance;
use hallbraid_core::ModelParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec() -> WeightSpec {
    WeightSpec::new(2.6, 0.55, 0.6).unwrap()
}

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.0, 1.0).unwrap()
}

/// `n^2 n'^2 (n-n')^2 (l - l' - l'')` for `gamma = 1`, exactly.
fn scaled_defect_exact(m: i64, n: i64, mp: i64, np: i64) -> i128 {
    let (m, n, mp, np) = (m as i128, n as i128, mp as i128, np as i128);
    let (mq, nq) = (m - mp, n - np);
    m.pow(3) * (np * nq).pow(2) - mp.pow(3) * (n * nq).pow(2) - mq.pow(3) * (n * np).pow(2)
}

#[test]
fn resonance_identity_on_random_tuples() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10_000 {
        let m = rng.gen_range(-200i64..=200);
        let n = rng.gen_range(-60i64..=60);
        let mp = rng.gen_range(-300i64..=300);
        let np = rng.gen_range(-90i64..=90);
        if m == 0 || n == 0 || np == 0 || np == n {
            continue;
        }
        let direct = resonance_gap(m, n, mp, np, &p).unwrap();
        let factored = resonance_gap_factored(m, n, mp, np, &p).unwrap();
        let nq = n - np;
        let exact =
            (scaled_defect_exact(m, n, mp, np) as f64).abs() / ((n * np * nq) as f64).powi(2);
        // size of the three phases that cancel in the difference
        let scale = p.symbol(m, n).abs() + p.symbol(mp, np).abs() + p.symbol(m - mp, nq).abs();
        assert!(
            (direct - factored).abs() <= 1e-10 * scale,
            "{m} {n} {mp} {np}"
        );
        assert!((direct - exact).abs() <= 1e-12 * scale);
        checked += 1;
    }
}

#[test]
fn resonance_gap_fixture() {
    let p = params();
    let g = resonance_gap(4, 1, 2, 3, &p).unwrap();
    assert!((g - 550.0 / 9.0).abs() < 1e-12);
    let f = resonance_gap_factored(4, 1, 2, 3, &p).unwrap();
    assert!((f - 550.0 / 9.0).abs() < 1e-10);
    assert!(resonance_defect(1, 2, 1, 2, &p).is_err());
}

#[test]
fn resonance_f_zeros_and_poles() {
    assert_eq!(resonance_f(0.0, 2.0).unwrap(), 0.0);
    assert_eq!(resonance_f(0.3, 0.3).unwrap(), 0.0);
    assert!((resonance_f(1.0, 2.0).unwrap() - 0.75).abs() < 1e-15);
    for z in [0.0, 0.5, 1.0] {
        assert!(resonance_f(0.2, z).is_err());
    }
}

/// Composite Simpson on `n` panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `int (a + |t - k1|)^{-p} (c + |t - k2|)^{-p} dt` on a grid graded
/// exponentially away from both kinks, with no shared code.
fn dense_integral(a: f64, c: f64, k1: f64, k2: f64, p: f64) -> f64 {
    let f = |t: f64| (a + (t - k1).abs()).powf(-p) * (c + (t - k2).abs()).powf(-p);
    let (lo, hi) = (k1.min(k2), k1.max(k2));
    let graded = |x0: f64, dir: f64, len: f64| {
        let umax = len.ln_1p();
        simpson(|u| f(x0 + dir * u.exp_m1()) * u.exp(), 0.0, umax, 20_000)
    };
    let far = 1e14;
    let mut total = graded(lo, -1.0, far) + graded(hi, 1.0, far);
    if hi > lo {
        let half = 0.5 * (hi - lo);
        total += graded(lo, 1.0, half) + graded(hi, -1.0, half);
    }
    // algebraic tails beyond the graded range, leading order
    total + 2.0 * far.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0)
}

fn brute_force_kernel(
    m: i64,
    n: i64,
    tau: f64,
    trunc: Truncation,
    s: &WeightSpec,
    p: &ModelParams,
) -> f64 {
    let l = p.symbol(m, n);
    let n2 = (n * n) as f64;
    let pre =
        (m * m) as f64 * rho(m, n, s.s()) * (n2 + (tau - l).abs()).powf(2.0 * s.bprime() - 2.0);
    let mut total = 0.0;
    for np in -trunc.n_max..=trunc.n_max {
        let nq = n - np;
        if np == 0 || nq == 0 || nq.abs() > trunc.n_max {
            continue;
        }
        for mp in -trunc.m_max..=trunc.m_max {
            let mq = m - mp;
            if mq.abs() > trunc.m_max {
                continue;
            }
            let i = dense_integral(
                (np * np) as f64,
                (nq * nq) as f64,
                p.symbol(mp, np),
                tau - p.symbol(mq, nq),
                2.0 * s.b(),
            );
            total += pre * i / (rho(mp, np, s.s()) * rho(mq, nq, s.s()));
        }
    }
    total
}

#[test]
fn kernel_sum_matches_brute_force_at_small_truncation() {
    let s = spec();
    let p = params();
    let trunc = Truncation { m_max: 3, n_max: 3 };
    for (m, n) in [(1i64, 1i64), (2, 1), (1, 2), (3, 2)] {
        for tau in [p.symbol(m, n), p.symbol(m, n) + 5.0, -7.5] {
            let oracle = brute_force_kernel(m, n, tau, trunc, &s, &p);
            for method in [
                InnerMethod::ClosedForm,
                InnerMethod::Adaptive(Tolerance::default()),
            ] {
                let got = kernel_sum_with(m, n, tau, trunc, &s, &p, method)
                    .unwrap()
                    .total;
                assert!(
                    (got - oracle).abs() <= 1e-8 * oracle,
                    "({m}, {n}, {tau}): {got} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn single_row_truncation_is_finite_and_matches() {
    // n = 1, n_max = 1: only n' = -1 is admissible (n - n' = 2 is cut),
    // so nothing survives; n_max = 2 admits n' = -1 and n' = 2.
    let s = spec();
    let p = params();
    let empty = kernel_sum(1, 1, 0.0, Truncation { m_max: 8, n_max: 1 }, &s, &p).unwrap();
    assert_eq!(empty.total, 0.0);
    let trunc = Truncation { m_max: 8, n_max: 2 };
    let k = kernel_sum(1, 1, 0.0, trunc, &s, &p).unwrap();
    let oracle = brute_force_kernel(1, 1, 0.0, trunc, &s, &p);
    assert!(k.total.is_finite() && k.total > 0.0);
    assert!((k.total - oracle).abs() <= 1e-8 * oracle);
}

#[test]
fn zero_m_gives_zero() {
    let k = kernel_sum(0, 3, 1.0, Truncation::square(8), &spec(), &params()).unwrap();
    assert_eq!(k.total, 0.0);
    assert!(kernel_sum(1, 0, 1.0, Truncation::square(8), &spec(), &params()).is_err());
}

#[test]
fn breakdown_reassembles_total() {
    let s = spec();
    let p = params();
    for (m, n) in [(3i64, 2i64), (7, 1), (5, 6), (12, 3)] {
        let k = kernel_sum_with(
            m,
            n,
            p.symbol(m, n) + 3.0,
            Truncation::square(12),
            &s,
            &p,
            InnerMethod::ClosedForm,
        )
        .unwrap();
        let sum: f64 = k.breakdown.iter().sum();
        assert!((sum - k.total).abs() <= 1e-10 * k.total);
        assert!(k.breakdown.iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn every_half_lattice_tuple_has_one_label() {
    let s = spec();
    for n in [1i64, 2, 5, -3] {
        for m in [1i64, -2, 7] {
            for np in -16i64..=16 {
                for mp in -16i64..=16 {
                    let r = classify(m, n, mp, np, &s);
                    let in_half = np != 0 && np != n && 2 * np * n >= n * n;
                    assert_eq!(r.is_ok(), in_half, "({m},{n},{mp},{np})");
                    if let Ok(label) = r {
                        if np == 2 * n {
                            assert_eq!(label.set, Partition::B0);
                        } else if 2 * mp.abs() > 3 * m.abs() {
                            assert_eq!(label.set, Partition::B1);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn classification_examples() {
    let s = spec();
    assert_eq!(classify(3, 2, 99, 4, &s).unwrap().set, Partition::B0);
    assert_eq!(classify(0, 2, 5, 4, &s).unwrap().set, Partition::B0);
    assert_eq!(classify(4, 3, 8, 5, &s).unwrap().set, Partition::B1);
    // eta = 1/2, zeta = 3/4 with n large enough that k and k1 are small
    let label = classify(40, 40, 20, 30, &s).unwrap();
    assert_eq!(label.set, Partition::SComplement);
    assert!((label.eta - 0.5).abs() < 1e-15 && (label.zeta - 0.75).abs() < 1e-15);
}

#[test]
fn tc_gap_constant_is_positive() {
    let s = spec();
    let c = tc_gap_constant(12, 12, Truncation::square(16), &s, &params())
        .unwrap()
        .expect("T^c is non-empty at this size");
    assert!(c > 0.0, "{c}");
}

#[test]
fn resonant_probe_dominates_far_probe() {
    let s = spec();
    let p = params();
    let trunc = Truncation::square(10);
    for (m, n) in [(2i64, 1i64), (5, 3), (9, 2)] {
        let l = p.symbol(m, n);
        let near = kernel_sum_with(m, n, l, trunc, &s, &p, InnerMethod::ClosedForm)
            .unwrap()
            .total;
        let far = kernel_sum_with(m, n, l + 1e6, trunc, &s, &p, InnerMethod::ClosedForm)
            .unwrap()
            .total;
        assert!(near >= far, "({m},{n}): {near} < {far}");
    }
}

#[test]
fn b1_part_decays_at_least_like_its_tail_bound() {
    let s = spec();
    let p = params();
    let trunc = Truncation::square(48);
    for n in [1i64, 3] {
        let part = |m: i64| {
            kernel_sum_with(m, n, p.symbol(m, n), trunc, &s, &p, InnerMethod::ClosedForm)
                .unwrap()
                .part(Partition::B1)
        };
        let rate = (part(8) / part(16)).log2();
        assert!(rate >= 2.0 * s.s() - 4.0, "n = {n}: decay exponent {rate}");
    }
}

#[test]
fn small_m_regime_scales_like_m_squared_over_n_power() {
    let s = spec();
    let p = params();
    let trunc = Truncation::square(32);
    let sup = |m: i64, n: i64| {
        hallbraid_core::kernel::tau_probes(m, n, (-2, 12), &p)
            .into_iter()
            .map(|t| {
                kernel_sum_with(m, n, t, trunc, &s, &p, InnerMethod::ClosedForm)
                    .unwrap()
                    .total
            })
            .fold(0.0, f64::max)
    };
    let m_slope = (sup(4, 16) / sup(1, 16)).log2() / 2.0;
    assert!((m_slope - 2.0).abs() <= 0.2, "m exponent {m_slope}");
    let expected = 4.0 - 4.0 * (s.bprime() - s.b());
    let n_slope = (sup(1, 8) / sup(1, 16)).log2();
    assert!(
        (n_slope - expected).abs() <= 0.1 * expected,
        "n exponent {n_slope} vs {expected}"
    );
}

#[test]
fn b0_line_term_grows_like_m_squared() {
    // (m', n') = (0, 2) at n = 1, tau = l_{m,1} is exactly resonant, and
    // rho_{m,1} / (rho_{0,2} rho_{m,-1}) = 4^{-s} for every m, so the term
    // is m^2 times a constant and the supremum over m is unbounded.
    let s = spec();
    let p = params();
    let base = summand(1, 1, p.symbol(1, 1), 0, 2, &s, &p, InnerMethod::ClosedForm).unwrap();
    assert_eq!(resonance_gap(64, 1, 0, 2, &p).unwrap(), 0.0);
    for m in [8i64, 32, 128] {
        let v = summand(m, 1, p.symbol(m, 1), 0, 2, &s, &p, InnerMethod::ClosedForm).unwrap();
        assert!((v / (m * m) as f64 - base).abs() <= 1e-12 * base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn summand_is_symmetric_under_swap(
        m in -20i64..=20, n in 1i64..=12, mp in -30i64..=30, np in -20i64..=20, dtau in -500.0f64..500.0
    ) {
        prop_assume!(np != 0 && np != n);
        let s = spec();
        let p = params();
        let tau = p.symbol(m, n) + dtau;
        let a = summand(m, n, tau, mp, np, &s, &p, InnerMethod::ClosedForm).unwrap();
        let b = summand(m, n, tau, m - mp, n - np, &s, &p, InnerMethod::ClosedForm).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}
