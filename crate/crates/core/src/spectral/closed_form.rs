//! Analytic results: Markovian eigenvalues, Lambert-W axis crossings, and the
//! detunings of the amplifying/decaying transitions.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use super::SweepVariant;
use crate::special::{bisect, lambert_w, WBranch};

/// `1/√(2e) ≈ 0.4289`; below this `κτ` the `u` axis carries two double zeros of `G`.
pub const DOUBLE_ZERO_THRESHOLD: f64 = 0.428_881_942_480_353_4;

/// `±√(κ² - Δω²)`, the `τ = 0` eigenvalues. Real for `|Δω| ≤ κ`, an imaginary
/// pair beyond.
pub fn markovian_eigenvalues(kappa: f64, delta_omega: f64) -> (Complex64, Complex64) {
    let d = kappa * kappa - delta_omega * delta_omega;
    let r = if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    };
    (r, -r)
}

/// Double zeros of `G` on the real axis, `u₀,₁ = W₀,₋₁(-2κ²τ²)/(2τ)`.
///
/// Returns `None` above the threshold `κτ = 1/√(2e)` or for non-positive
/// inputs. On success `u₁ ≤ u₀ < 0`.
pub fn g_double_zeros(kappa: f64, tau: f64) -> Option<(f64, f64)> {
    if !(kappa > 0.0 && tau > 0.0) {
        return None;
    }
    let x = -2.0 * (kappa * tau).powi(2);
    if x < -1.0 / E {
        return None;
    }
    let w0 = lambert_w(WBranch::Principal, x).ok()?;
    let wm = lambert_w(WBranch::Lower, x).ok()?;
    Some((w0 / (2.0 * tau), wm / (2.0 * tau)))
}

/// Positive real root of the symmetric characteristic equation, which carries
/// the central dome.
///
/// With `z = uτ` this solves `z·e^z = κτ·√(1 - (Δω·e^z/κ)²)`. A positive root
/// exists exactly when `|Δω| < κ`; it equals `W₀(κτ)/τ` at `Δω = 0` and tends
/// to zero at the dome edge `|Δω| = κ`.
pub fn central_dome_rate(kappa: f64, tau: f64, delta_omega: f64) -> Option<f64> {
    if !(kappa > 0.0 && tau > 0.0) {
        return None;
    }
    let dw = delta_omega.abs();
    if dw >= kappa {
        return None;
    }
    let kt = kappa * tau;
    let w0 = lambert_w(WBranch::Principal, kt).ok()?;
    if dw == 0.0 {
        return Some(w0 / tau);
    }
    let z_hi = w0.min((kappa / dw).ln());
    let h = |z: f64| {
        let s = dw * z.exp() / kappa;
        z * z.exp() - kt * (1.0 - s * s).max(0.0).sqrt()
    };
    let z = bisect(h, 0.0, z_hi, 1e-16 * z_hi.max(1e-300)).ok()?;
    Some(z / tau)
}

/// `Δω_n = √((nπ/2τ)² + κ²)` for even `n` in `[2, n_max]`.
pub fn transition_detunings(kappa: f64, tau: f64, n_max: u32) -> Vec<(u32, f64)> {
    if !(tau > 0.0) {
        return Vec::new();
    }
    (2..=n_max)
        .step_by(2)
        .map(|n| {
            let v = n as f64 * PI / (2.0 * tau);
            (n, v.hypot(kappa))
        })
        .collect()
}

/// Closed-form sideband width `π/τ - κ²τ/(π·n(n+2))`, halved for the fixed
/// second-laser sweep.
pub fn sow_predicted(kappa: f64, tau: f64, n: u32, variant: SweepVariant) -> f64 {
    let n = n as f64;
    let full = PI / tau - kappa * kappa * tau / (PI * n * (n + 2.0));
    match variant {
        SweepVariant::SymmetricLTau => full,
        SweepVariant::FixedSecondLaser => 0.5 * full,
    }
}

/// `Δω_{n+2} - Δω_n` evaluated exactly from the transition detunings.
pub fn sow_exact_difference(kappa: f64, tau: f64, n: u32) -> f64 {
    let d = |m: u32| (m as f64 * PI / (2.0 * tau)).hypot(kappa);
    d(n + 2) - d(n)
}

/// One line of the closed-form versus exact-difference comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SowReportRow {
    pub n: u32,
    pub exact: f64,
    pub closed_form: f64,
    /// `π/τ - Δω_{n+2} + Δω_n`.
    pub exact_deviation: f64,
    /// `κ²τ/(π·n(n+2))` as printed in the closed form.
    pub closed_form_deviation: f64,
    /// Leading-order expansion of the exact difference, `2κ²τ/(π·n(n+2))`.
    pub asymptotic_deviation: f64,
}

impl SowReportRow {
    /// Ratio of the exact deviation to the closed-form correction; tends to 2.
    pub fn coefficient_ratio(&self) -> f64 {
        self.exact_deviation / self.closed_form_deviation
    }
}

/// Tabulates exact sideband widths against the closed form for even `n`.
pub fn sow_report(kappa: f64, tau: f64, n_max: u32) -> Vec<SowReportRow> {
    (2..=n_max)
        .step_by(2)
        .map(|n| {
            let nf = n as f64;
            let exact = sow_exact_difference(kappa, tau, n);
            let closed_form = sow_predicted(kappa, tau, n, SweepVariant::SymmetricLTau);
            let corr = kappa * kappa * tau / (PI * nf * (nf + 2.0));
            SowReportRow {
                n,
                exact,
                closed_form,
                exact_deviation: PI / tau - exact,
                closed_form_deviation: corr,
                asymptotic_deviation: 2.0 * corr,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_constant() {
        assert!((DOUBLE_ZERO_THRESHOLD - 1.0 / (2.0 * E).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn markovian_examples() {
        let (a, b) = markovian_eigenvalues(1.5, 0.0);
        assert_eq!((a, b), (Complex64::new(1.5, 0.0), Complex64::new(-1.5, 0.0)));
        let (a, b) = markovian_eigenvalues(1.0, 1.0);
        assert_eq!(a.norm(), 0.0);
        assert_eq!(b.norm(), 0.0);
        let (a, b) = markovian_eigenvalues(1.0, 2.0);
        assert!((a - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-15);
        assert!((b + a).norm() == 0.0);
    }

    #[test]
    fn double_zeros_match_bisection() {
        let (kappa, tau) = (0.1, 2.0);
        let c = 2.0 * (kappa * tau) * (kappa * tau);
        // Oracle: z·e^z + 2κ²τ² has one root in (-1, 0) and one below -1.
        let h = |z: f64| z * z.exp() + c;
        let bis = |mut a: f64, mut b: f64| {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if h(a).signum() == h(m).signum() {
                    a = m
                } else {
                    b = m
                }
            }
            0.5 * (a + b)
        };
        let z0 = bis(-1.0, 0.0);
        let z1 = bis(-60.0, -1.0);
        let (u0, u1) = g_double_zeros(kappa, tau).unwrap();
        assert!((u0 - z0 / (2.0 * tau)).abs() < 1e-13);
        assert!((u1 - z1 / (2.0 * tau)).abs() < 1e-12);
        assert!(u1 < u0 && u0 < 0.0);
        assert!(g_double_zeros(0.3, 2.0).is_none());
    }

    #[test]
    fn double_zero_small_coupling_series() {
        let tau = 1.0;
        for kappa in [1e-3, 1e-4] {
            let (u0, _) = g_double_zeros(kappa, tau).unwrap();
            let lead = -kappa * kappa * tau;
            assert!(((u0 - lead) / lead).abs() < 10.0 * kappa * kappa, "{u0} vs {lead}");
        }
    }

    #[test]
    fn dome_rate_against_direct_bisection() {
        let (kappa, tau, dw) = (1.0, 1.0, 0.5);
        // Oracle: u² + Δω² - κ²e^{-2uτ} on [0, κ].
        let f = |u: f64| u * u + dw * dw - kappa * kappa * (-2.0 * u * tau).exp();
        let (mut a, mut b) = (0.0, kappa);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                b = m
            } else {
                a = m
            }
        }
        let u = central_dome_rate(kappa, tau, dw).unwrap();
        assert!((u - 0.5 * (a + b)).abs() < 1e-13, "{u}");
    }

    #[test]
    fn dome_rate_limits() {
        let u = central_dome_rate(2.0, 0.75, 0.0).unwrap();
        assert_eq!(u, lambert_w(WBranch::Principal, 1.5).unwrap() / 0.75);
        assert!(central_dome_rate(1.0, 1.0, 5.0).is_none());
        assert!(central_dome_rate(1.0, 1.0, 1.0).is_none());
        let near = central_dome_rate(1.0, 1.0, 0.999_999).unwrap();
        assert!(near > 0.0 && near < 1e-5);
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let u = central_dome_rate(1.0, 2.0, k as f64 / 20.0).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn transition_detuning_values() {
        let t = transition_detunings(0.0, 2.0, 2);
        assert_eq!(t, vec![(2, PI / 2.0)]);
        let tau = 1.3;
        let kappa = 2.0 / tau;
        let t = transition_detunings(kappa, tau, 12);
        assert_eq!(t.len(), 6);
        assert!((t[0].1 - (PI * PI + 4.0).sqrt() / tau).abs() < 1e-14);
        assert!(t.windows(2).all(|w| w[1].1 > w[0].1));
        let far = transition_detunings(kappa, tau, 400);
        let d = far[far.len() - 1].1 - far[far.len() - 2].1;
        assert!((d - PI / tau).abs() < 1e-4);
    }

    #[test]
    fn sow_prediction_values() {
        assert_eq!(sow_predicted(0.0, 0.7, 4, SweepVariant::SymmetricLTau), PI / 0.7);
        let tau = 1.7;
        let kappa = 2.0 / tau;
        let got = sow_predicted(kappa, tau, 10, SweepVariant::SymmetricLTau);
        let want = PI / tau - 4.0 / (120.0 * PI) / tau;
        assert!((got - want).abs() < 1e-14);
        assert_eq!(sow_predicted(kappa, tau, 10, SweepVariant::FixedSecondLaser), 0.5 * got);
        assert!((sow_predicted(kappa, tau, 10_000, SweepVariant::SymmetricLTau) - PI / tau).abs() < 1e-7);
    }

    #[test]
    fn exact_difference_deviation_is_twice_closed_form_asymptotically() {
        let rows = sow_report(1.0, 2.0, 400);
        let last = rows.last().unwrap();
        assert!((last.coefficient_ratio() - 2.0).abs() < 1e-3);
        for r in &rows {
            assert!(r.exact < PI / 2.0);
        }
    }
}
