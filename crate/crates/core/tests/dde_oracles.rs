use delay_apt::dde::{integrate, ConstantHistory, DelaySystem, Retention, Trajectory};
use delay_apt::models::{seed_minimal_history, LkModel, LkParams, MinimalModel, MinimalParams};
use num_complex::Complex64;

/// `x'(t) = -x(t - 1)`.
struct NegativeFeedback;

impl DelaySystem for NegativeFeedback {
    fn dim(&self) -> usize {
        1
    }
    fn delay(&self) -> f64 {
        1.0
    }
    fn rhs(&self, _t: f64, _x: &[f64], xd: &[f64], out: &mut [f64]) {
        out[0] = -xd[0];
    }
}

/// Method of steps for the unit-history problem: on `[k-1, k]`,
/// `x(t) = Σ_{j=0}^{k} (-1)^j (t - j + 1)^j / j!`.
fn steps_solution(t: f64) -> f64 {
    let k = t.ceil().max(1.0) as i32;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for j in 0..=k {
        if j > 0 {
            fact *= j as f64;
        }
        sum += (-1.0f64).powi(j) * (t - j as f64 + 1.0).powi(j) / fact;
    }
    sum
}

fn sample_at(traj: &Trajectory, t: f64) -> &[f64] {
    let i = ((t / traj.h).round() as i64 - traj.first_step) as usize;
    assert!((traj.time(i) - t).abs() < 1e-9);
    traj.state(i)
}

#[test]
fn scalar_delay_matches_method_of_steps() {
    let traj = integrate(&NegativeFeedback, &ConstantHistory(vec![1.0]), 1e-3, 4.0, Retention::Full).unwrap();
    for t in [0.5, 1.0, 1.5, 2.0, 2.7, 3.0, 3.5, 4.0] {
        let x = sample_at(&traj, t)[0];
        assert!((x - steps_solution(t)).abs() < 1e-10, "t={t}: {x} vs {}", steps_solution(t));
    }
    assert!((steps_solution(2.0) - (1.0 - 2.0 + 0.5)).abs() < 1e-15);
}

fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

fn delayed_linear_end_state(h: f64, t_end: f64) -> Vec<f64> {
    let p = MinimalParams::symmetric(20.0, 3.0, 1.0);
    let hist = ConstantHistory(vec![1.0, 0.0, 1.0, 0.0]);
    let traj = integrate(&MinimalModel::new(p), &hist, h, t_end, Retention::Trailing(0.0)).unwrap();
    assert!((traj.time(traj.len() - 1) - t_end).abs() < 1e-9);
    traj.last_state().to_vec()
}

#[test]
fn delayed_linear_problem_converges_at_least_second_order() {
    // The constant history leaves derivative jumps at multiples of the delay.
    let t_end = 3.0;
    let reference = delayed_linear_end_state(1e-5, t_end);
    let scale = reference.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for hs in [
        vec![8e-4, 4e-4, 2e-4, 1e-4],
        // Breaking points between grid nodes, a third of a step past a node.
        (0..4).map(|k| t_end / (300.0 * 2f64.powi(k) + 1.0)).collect::<Vec<f64>>(),
    ] {
        let errors: Vec<f64> = hs
            .iter()
            .map(|&h| {
                delayed_linear_end_state(h, t_end)
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
                    / scale
            })
            .collect();
        let orders = observed_orders(&errors);
        eprintln!("delayed linear h {hs:?} errors {errors:?} orders {orders:?}");
        assert!(orders.iter().all(|p| *p >= 2.0), "{orders:?}");
    }
}

#[test]
fn uncoupled_rotation_is_fourth_order() {
    let dw = 30.0;
    let p = MinimalParams::symmetric(dw, 0.0, 0.5);
    let model = MinimalModel::new(p);
    let (hist, _) = seed_minimal_history(&p);
    let t_end = 10.0;
    let hs = [8e-4, 4e-4, 2e-4, 1e-4];
    let errors: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let traj = integrate(&model, &hist, h, t_end, Retention::Trailing(0.0)).unwrap();
            let x = traj.last_state();
            let exact = Complex64::from_polar(1.0, dw * t_end);
            (Complex64::new(x[0], x[1]) - exact).norm()
        })
        .collect();
    let orders = observed_orders(&errors);
    eprintln!("rotation errors {errors:?} orders {orders:?}");
    for p in &orders {
        assert!((p - 4.0).abs() <= 0.2, "{orders:?}");
    }
}

#[test]
fn uncoupled_lasers_are_fourth_order() {
    // Relaxation oscillations after a carrier kick: nonlinear and smooth,
    // while κ = 0 keeps the delay inactive.
    let p = LkParams { tau: 0.3, ..LkParams::default() };
    let model = LkModel::new(p);
    let e = p.solitary_intensity(p.pump1).sqrt();
    let hist = ConstantHistory(vec![e, 0.0, 0.3 * e, 0.2 * e, 2e-3, -1e-3]);
    let t_end = 1.0;
    let run = |h: f64| integrate(&model, &hist, h, t_end, Retention::Trailing(0.0)).unwrap().last_state().to_vec();
    let reference = run(1e-5);
    let hs = [8e-4, 4e-4, 2e-4, 1e-4];
    let errors: Vec<f64> = hs
        .iter()
        .map(|&h| {
            run(h).iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    let orders = observed_orders(&errors);
    eprintln!("laser errors {errors:?} orders {orders:?}");
    for p in &orders {
        assert!((p - 4.0).abs() <= 0.2, "{orders:?}");
    }
}

#[test]
fn decoupled_phase_error_is_tiny() {
    let dw = 2.0;
    let p = MinimalParams::symmetric(dw, 0.0, 1.0);
    let hist = ConstantHistory(vec![1.0, 0.0, 1.0, 0.0]);
    let traj = integrate(&MinimalModel::new(p), &hist, 1e-4, 10.0, Retention::Trailing(0.0)).unwrap();
    let x = traj.last_state();
    let z = Complex64::new(x[0], x[1]);
    let phase_err = (z * Complex64::from_polar(1.0, -dw * 10.0)).arg().abs();
    assert!(phase_err <= 1e-10, "{phase_err}");
    assert!((z.norm() - 1.0).abs() <= 1e-10);
}

/// `e^{L t}(1, 1)` for `L = [[iΔω, κφ], [κφ, -iΔω]]` by eigendecomposition.
fn undelayed_oracle(dw: f64, k: Complex64, t: f64) -> [Complex64; 2] {
    let i_dw = Complex64::new(0.0, dw);
    let mu = (k * k - dw * dw).sqrt();
    // Eigenvectors (κφ, ±μ - iΔω).
    let v = [[k, mu - i_dw], [k, -mu - i_dw]];
    // Solve c₊v₊ + c₋v₋ = (1, 1).
    let det = v[0][0] * v[1][1] - v[1][0] * v[0][1];
    let cp = (v[1][1] - v[1][0]) / det;
    let cm = (v[0][0] - v[0][1]) / det;
    let ep = (mu * t).exp();
    let em = (-mu * t).exp();
    [cp * ep * v[0][0] + cm * em * v[1][0], cp * ep * v[0][1] + cm * em * v[1][1]]
}

#[test]
fn undelayed_runs_match_eigendecomposition() {
    for (kappa, dw) in [(1.3f64, 0.7), (1.0, 2.5), (0.8, 0.0)] {
        // A whole number of steps.
        let t_end = (5.0 / kappa / 1e-4).round() * 1e-4;
        let exact = undelayed_oracle(dw, Complex64::new(kappa, 0.0), t_end);
        let scale = exact[0].norm().max(exact[1].norm());
        let ones = ConstantHistory(vec![1.0, 0.0, 1.0, 0.0]);

        let minimal = MinimalModel::new(MinimalParams::symmetric(dw, kappa, 0.0));
        let traj = integrate(&minimal, &ones, 1e-4, t_end, Retention::Trailing(0.0)).unwrap();
        let x = traj.last_state();
        let got = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
        for i in 0..2 {
            let rel = (got[i] - exact[i]).norm() / scale;
            assert!(rel <= 1e-8, "minimal kappa={kappa} dw={dw}: {rel}");
        }

        // Without gain the laser fields follow the same linear flow.
        let mut lk = LkParams::with_coupling(kappa, 0.0, dw, delay_apt::spectral::SweepVariant::SymmetricLTau);
        lk.gain = 0.0;
        let hist = ConstantHistory(vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let traj = integrate(&LkModel::new(lk), &hist, 1e-4, t_end, Retention::Trailing(0.0)).unwrap();
        let x = traj.last_state();
        let got = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
        for i in 0..2 {
            let rel = (got[i] - exact[i]).norm() / scale;
            assert!(rel <= 1e-8, "laser kappa={kappa} dw={dw}: {rel}");
        }
    }
}

#[test]
fn undelayed_oscillatory_mode_keeps_constant_intensity() {
    // Far outside the dome the eigenmodes of L are pure oscillations.
    let (kappa, dw) = (1.0, 10.0);
    let mu = Complex64::new(kappa * kappa - dw * dw, 0.0).sqrt();
    let b = (mu - Complex64::new(0.0, dw)) / kappa;
    let hist = ConstantHistory(vec![1.0, 0.0, b.re, b.im]);
    let traj = integrate(
        &MinimalModel::new(MinimalParams::symmetric(dw, kappa, 0.0)),
        &hist,
        1e-4,
        5.0,
        Retention::Full,
    )
    .unwrap();
    for (_, x) in traj.iter() {
        let i1 = x[0] * x[0] + x[1] * x[1];
        assert!((i1 - 1.0).abs() < 1e-10, "{i1}");
    }
}

#[test]
fn identical_runs_are_identical() {
    let p = LkParams::with_coupling(2.0, 1.0, 5.0, delay_apt::spectral::SweepVariant::FixedSecondLaser);
    let hist = ConstantHistory(vec![1.0, 0.0, 0.5, 0.5, 0.0, 0.0]);
    let a = integrate(&LkModel::new(p), &hist, 1e-3, 5.0, Retention::Full).unwrap();
    let b = integrate(&LkModel::new(p), &hist, 1e-3, 5.0, Retention::Full).unwrap();
    assert_eq!(a, b);
}
