use hallbraid_core::diagnostics::{
    coeff_energy, dissipation, energy_balance, hs0b_norm, l2_energy, pde_residual, sobolev_norm,
    tsb_norm, CoefficientHistory, CutoffSpec,
};
use hallbraid_core::kernel::WeightSpec;
use hallbraid_core::solver::{solve, SolverConfig};
use hallbraid_core::{enforce_symmetry, GridSpec, ModelParams, PhysicalField, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.5, 1.0).unwrap()
}

fn two_mode(grid: GridSpec) -> SpectralField {
    SpectralField::from_modes(
        grid,
        &[
            (1, 1, Complex64::new(0.1, 0.0)),
            (2, 2, Complex64::new(0.0, 0.1)),
        ],
        0.0,
    )
    .unwrap()
}

#[test]
fn cosine_energy_fixtures() {
    let g = GridSpec::new(8, 8).unwrap();
    let cos_y = PhysicalField::from_fn(g, 0.0, |_, y| y.cos());
    assert!((l2_energy(&cos_y) - PI * PI).abs() < 1e-12);
    let cos_2y = PhysicalField::from_fn(g, 0.0, |_, y| (2.0 * y).cos());
    assert!((dissipation(&cos_2y) - 4.0 * PI * PI).abs() < 1e-12);
    let zero = PhysicalField::from_fn(g, 0.0, |_, _| 0.0);
    assert_eq!(l2_energy(&zero), 0.0);
}

#[test]
fn hs0b_single_mode_fixture() {
    // (1,1) and its conjugate partner (-1,1), each also standing for n = -1:
    // four lattice points with |n|^{4b-2} (|m|+|n|)^{2s} = 2^{5.2}.
    let g = GridSpec::new(8, 8).unwrap();
    let c = SpectralField::from_modes(g, &[(1, 1, Complex64::new(1.0, 0.0))], 0.0).unwrap();
    let norm = hs0b_norm(&c, 2.6, 0.55);
    let expected = (4.0 * 2f64.powf(5.2)).sqrt();
    assert!(
        (norm - expected).abs() < 1e-12 * expected,
        "{norm} vs {expected}"
    );
}

#[test]
fn hs0b_at_half_is_sobolev() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = GridSpec::new(12, 8).unwrap();
    let coeffs = (0..g.n_coeffs())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let c = enforce_symmetry(&SpectralField::from_coeffs(g, coeffs, 0.0).unwrap());
    let a = hs0b_norm(&c, 1.7, 0.5);
    let b = sobolev_norm(&c, 1.7);
    assert!((a - b).abs() < 1e-13 * b);
}

#[test]
fn energy_balance_is_second_order() {
    let p = params();
    let g = GridSpec::new(32, 32).unwrap();
    let c0 = two_mode(g);
    let mut residuals = Vec::new();
    for window in [2e-2, 1e-2] {
        let cfg = SolverConfig {
            window,
            record_interior: true,
            ..SolverConfig::default()
        };
        let traj = solve(&c0, 0.5, &p, &cfg).unwrap();
        let ledger = energy_balance(&traj);
        assert!(ledger.gronwall_margin.iter().all(|m| *m <= 1e-6));
        residuals.push(ledger.max_relative_residual());
    }
    assert!(residuals[0] <= 1e-4, "{:e}", residuals[0]);
    let order = (residuals[0] / residuals[1]).log2();
    assert!((1.8..2.3).contains(&order), "observed order {order}");
}

#[test]
fn pde_residual_shrinks_at_second_order() {
    let p = params();
    let g = GridSpec::new(16, 16).unwrap();
    let c0 = two_mode(g);
    let worst = |window: f64| {
        let cfg = SolverConfig {
            window,
            record_interior: true,
            ..SolverConfig::default()
        };
        let traj = solve(&c0, 0.2, &p, &cfg).unwrap();
        pde_residual(&traj, &p)
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max)
    };
    let coarse = worst(2e-2);
    let fine = worst(1e-2);
    let ratio = fine / coarse;
    assert!((0.2..0.3).contains(&ratio), "ratio {ratio}");
    assert!(coarse < 1e-3, "{coarse:e}");
}

#[test]
fn zero_trajectory_has_zero_residual() {
    let p = params();
    let g = GridSpec::new(8, 8).unwrap();
    let cfg = SolverConfig {
        record_interior: true,
        ..SolverConfig::default()
    };
    let traj = solve(&SpectralField::zeros(g, 0.0), 0.05, &p, &cfg).unwrap();
    assert!(pde_residual(&traj, &p).unwrap().iter().all(|r| *r == 0.0));
}

fn cosine_history(g: GridSpec, cutoff: &CutoffSpec) -> CoefficientHistory {
    CoefficientHistory::from_fn(g, cutoff, |t| {
        let a = 0.5 * cutoff.phi(t) * (-t).exp();
        SpectralField::from_modes(g, &[(0, 1, Complex64::new(a, 0.0))], t).unwrap()
    })
}

#[test]
fn tsb_norm_converges_under_sample_refinement() {
    let p = params();
    let g = GridSpec::new(8, 8).unwrap();
    let spec = WeightSpec::new(2.6, 0.55, 0.6).unwrap();
    let coarse_cut = CutoffSpec::new(0.5, 256).unwrap();
    let fine_cut = CutoffSpec::new(0.5, 512).unwrap();
    let coarse = tsb_norm(&cosine_history(g, &coarse_cut), &spec, &coarse_cut, &p).unwrap();
    let fine = tsb_norm(&cosine_history(g, &fine_cut), &spec, &fine_cut, &p).unwrap();
    assert!(coarse > 0.0);
    assert!(((coarse - fine) / fine).abs() <= 1e-3, "{coarse} vs {fine}");
}

#[test]
fn tsb_norm_of_zero_and_scaling() {
    let p = params();
    let g = GridSpec::new(8, 8).unwrap();
    let spec = WeightSpec::new(2.6, 0.55, 0.6).unwrap();
    let cut = CutoffSpec::new(0.5, 256).unwrap();
    let zero = CoefficientHistory::from_fn(g, &cut, |t| SpectralField::zeros(g, t));
    assert_eq!(tsb_norm(&zero, &spec, &cut, &p).unwrap(), 0.0);
    let h = cosine_history(g, &cut);
    let a = tsb_norm(&h, &spec, &cut, &p).unwrap();
    let b = tsb_norm(&h.scaled(-3.0), &spec, &cut, &p).unwrap();
    assert!((b - 3.0 * a).abs() < 1e-12 * b);
}

#[test]
fn tsb_norm_flags_unresolved_histories() {
    let p = params();
    let g = GridSpec::new(8, 8).unwrap();
    let spec = WeightSpec::new(2.6, 0.55, 0.6).unwrap();
    let cut = CutoffSpec::new(0.5, 16).unwrap();
    // a jump at t = 0 spreads energy over every frequency
    let rough = CoefficientHistory::from_fn(g, &cut, |t| {
        let a = if t < 0.0 { 0.0 } else { cut.phi(t) };
        SpectralField::from_modes(g, &[(0, 1, Complex64::new(a, 0.0))], t).unwrap()
    });
    assert!(tsb_norm(&rough, &spec, &cut, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poincare_inequality(seed in any::<u64>()) {
        let g = GridSpec::new(8, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..g.n_coeffs())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let c = enforce_symmetry(&SpectralField::from_coeffs(g, coeffs, 0.0).unwrap());
        let f = hallbraid_core::inverse_transform(&c, None).unwrap();
        prop_assert!(dissipation(&f) >= l2_energy(&f) * (1.0 - 1e-12));
        prop_assert!((coeff_energy(&c) - l2_energy(&f)).abs() <= 1e-10 * coeff_energy(&c));
    }

    #[test]
    fn hs0b_is_homogeneous_and_monotone(seed in any::<u64>(), k in -5.0f64..5.0) {
        let g = GridSpec::new(8, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..g.n_coeffs())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let c = enforce_symmetry(&SpectralField::from_coeffs(g, coeffs, 0.0).unwrap());
        let a = hs0b_norm(&c, 2.6, 0.55);
        prop_assert!((hs0b_norm(&c.scaled(k), 2.6, 0.55) - k.abs() * a).abs() <= 1e-12 * a * k.abs().max(1.0));
        prop_assert!(hs0b_norm(&c, 3.0, 0.55) >= a);
    }
}
