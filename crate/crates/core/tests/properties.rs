use std::f64::consts::{E, PI};

use delay_apt::analysis::{extract_sow, fit_slope_through_origin, normalize_profile, SweepProfile};
use delay_apt::cli::{Mode, RunConfig, Source};
use delay_apt::dde::DelaySystem;
use delay_apt::models::{lk_rhs, minimal_rhs, point_seed, LkModel, LkParams, LkState, MinimalParams};
use delay_apt::special::{lambert_w, WBranch};
use delay_apt::spectral::{
    char_residual, dominant_rate, find_eigenvalues, markovian_eigenvalues, SearchWindow, SpectralParams,
    SweepVariant,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = SweepVariant> {
    prop_oneof![Just(SweepVariant::SymmetricLTau), Just(SweepVariant::FixedSecondLaser)]
}

proptest! {
    #[test]
    fn lambert_principal_round_trip(x in -1.0 / E..50.0) {
        let w = lambert_w(WBranch::Principal, x).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-13 * x.abs().max(1e-300) + 1e-15);
    }

    #[test]
    fn lambert_lower_round_trip(x in -1.0 / E..-1e-6) {
        let w = lambert_w(WBranch::Lower, x).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-13 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn undelayed_spectrum_is_markovian(kappa in 0.01f64..5.0, ratio in 0.0f64..4.0) {
        let dw = ratio * kappa;
        let p = SpectralParams::symmetric(dw, kappa, 0.0);
        let roots = find_eigenvalues(&p, &SearchWindow::default_for(&p)).unwrap();
        let (a, b) = markovian_eigenvalues(kappa, dw);
        prop_assert_eq!(roots.len(), 2);
        for want in [a, b] {
            let best = roots.iter().map(|r| (r.lambda() - want).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-9, "{} missing from {:?}", want, roots);
        }
    }

    #[test]
    fn symmetric_spectrum_is_conjugation_closed(kappa in 0.2f64..2.0, tau in 0.2f64..1.5, ratio in 0.0f64..3.0) {
        let p = SpectralParams::symmetric(ratio * kappa, kappa, tau);
        let roots = find_eigenvalues(&p, &SearchWindow::default_for(&p)).unwrap();
        let scale = kappa * kappa;
        for r in &roots {
            prop_assert!(r.residual <= 1e-9 * scale);
            prop_assert!(char_residual(r.lambda().conj(), &p).norm() <= 1e-8 * scale);
        }
    }

    #[test]
    fn dominant_rate_is_even_in_detuning(kappa in 0.2f64..2.0, tau in 0.2f64..1.5, dw in 0.0f64..6.0) {
        let p = SpectralParams::symmetric(dw, kappa, tau);
        let q = p.with_delta_omega(-dw);
        let a = dominant_rate(&p, &SearchWindow::default_for(&p)).unwrap();
        let b = dominant_rate(&q, &SearchWindow::default_for(&q)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * kappa.max(1.0));
    }

    #[test]
    fn dominant_rate_never_exceeds_coupling(kappa in 0.1f64..3.0, tau in 0.1f64..2.0, dw in -5.0f64..5.0, v in variant(), w2 in -3.0f64..3.0) {
        let p = SpectralParams { delta_omega: dw, kappa, tau, variant: v, omega_fixed: w2 };
        let u = dominant_rate(&p, &SearchWindow::default_for(&p)).unwrap();
        prop_assert!(u <= kappa * (1.0 + 1e-9));
    }
}

fn state() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-10.0f64..10.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn carrier_free_laser_is_minimal_model(
        x in state(), xd in state(), kappa in 0.0f64..20.0, tau in 0.0f64..3.0,
        dw in -50.0f64..50.0, v in variant(), w2 in -10.0f64..10.0,
    ) {
        let p = LkParams { omega_fixed: w2, ..LkParams::with_coupling(kappa, tau, dw, v) };
        let s = LkState::from_slice(&[x[0], x[1], x[2], x[3], 0.0, 0.0]);
        let d = LkState::from_slice(&[xd[0], xd[1], xd[2], xd[3], 0.0, 0.0]);
        let f = lk_rhs(0.0, &s, &d, &p);
        let mp: MinimalParams = p.minimal();
        let g = minimal_rhs(0.0, [s.e1, s.e2], [d.e1, d.e2], &mp);
        prop_assert_eq!(f.e1, g[0]);
        prop_assert_eq!(f.e2, g[1]);
    }

    #[test]
    fn laser_rhs_is_phase_equivariant(x in state(), xd in state(), theta in 0.0f64..6.3, dw in -20.0f64..20.0) {
        let p = LkParams::with_coupling(1.5, 0.7, dw, SweepVariant::SymmetricLTau);
        let m = LkModel::new(p);
        let rot = Complex64::from_polar(1.0, theta);
        let turn = |v: &[f64; 6]| {
            let a = rot * Complex64::new(v[0], v[1]);
            let b = rot * Complex64::new(v[2], v[3]);
            [a.re, a.im, b.re, b.im, v[4] * 1e-3, v[5] * 1e-3]
        };
        let small = |v: &[f64; 6]| [v[0], v[1], v[2], v[3], v[4] * 1e-3, v[5] * 1e-3];
        let (mut f, mut g) = ([0.0; 6], [0.0; 6]);
        m.rhs(0.0, &small(&x), &small(&xd), &mut f);
        m.rhs(0.0, &turn(&x), &turn(&xd), &mut g);
        let fe1 = rot * Complex64::new(f[0], f[1]);
        let scale = f.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        prop_assert!((fe1 - Complex64::new(g[0], g[1])).norm() <= 1e-12 * scale);
        prop_assert!((f[4] - g[4]).abs() <= 1e-12 * scale);
    }
}

proptest! {
    #[test]
    fn normalisation_is_scale_invariant(
        values in prop::collection::vec(0.1f64..10.0, 20..80),
        factor in 0.01f64..100.0,
    ) {
        let n = values.len();
        let grid: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let p = SweepProfile::new(grid.clone(), values.clone(), values.clone(), 1.0, 1.0, SweepVariant::SymmetricLTau);
        let scaled: Vec<f64> = values.iter().map(|v| v * factor).collect();
        let q = SweepProfile::new(grid, scaled.clone(), scaled, 1.0, 1.0, SweepVariant::SymmetricLTau);
        let a = normalize_profile(&p).unwrap();
        let b = normalize_profile(&q).unwrap();
        for (x, y) in a.i1_norm.unwrap().iter().zip(b.i1_norm.unwrap()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }

    #[test]
    fn sinusoidal_sidebands_give_their_period(period in 0.5f64..4.0, phase in 0.0f64..6.3, amp in 0.01f64..0.3) {
        let hi = 60.0 * period;
        let n = 1200;
        let grid: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
        let y: Vec<f64> = grid.iter().map(|x| 1.0 + amp * (2.0 * PI * x / period + phase).cos()).collect();
        let p = SweepProfile::new(grid, y.clone(), y, 0.5, 1.0, SweepVariant::SymmetricLTau);
        let e = extract_sow(&p).unwrap();
        prop_assert!((e.value - period).abs() <= period * period / hi, "{:?}", e);
        prop_assert!((e.value - period).abs() <= e.fwhm_error);
    }

    #[test]
    fn slope_fit_recovers_exact_line(slope in -5.0f64..5.0, xs in prop::collection::vec(0.1f64..3.0, 2..10)) {
        let y: Vec<f64> = xs.iter().map(|x| slope * x).collect();
        let s: Vec<f64> = xs.iter().map(|x| 0.1 + 0.05 * x).collect();
        let f = fit_slope_through_origin(&xs, &y, &s).unwrap();
        prop_assert!((f.slope - slope).abs() <= 1e-12 * slope.abs().max(1.0));
    }

    #[test]
    fn point_seeds_are_deterministic(global in any::<u64>(), i in 0usize..100_000) {
        prop_assert_eq!(point_seed(global, i), point_seed(global, i));
        prop_assert_ne!(point_seed(global, i), point_seed(global, i + 1));
    }

    #[test]
    fn numeric_config_values_round_trip(kappa in 0.0f64..100.0, tau in 0.0f64..10.0) {
        let mut c = RunConfig::defaults(Mode::Eigen);
        c.set("kappa", &kappa.to_string(), Source::Set).unwrap();
        c.set("tau", &tau.to_string(), Source::Set).unwrap();
        prop_assert_eq!(c.kappa, kappa);
        prop_assert_eq!(c.tau, tau);
        prop_assert_eq!(c.get("kappa").unwrap().parse::<f64>().unwrap(), kappa);
    }
}
