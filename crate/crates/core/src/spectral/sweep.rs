//! Dominant rate along a detuning grid and the detunings where it changes sign.

use rayon::prelude::*;

use super::{dominant_rate, SearchWindow, SpectralError, SpectralParams};

/// `U(Δω)` on `grid`, each point with its default search window.
pub fn dominant_rate_curve(base: &SpectralParams, grid: &[f64]) -> Result<Vec<f64>, SpectralError> {
    grid.par_iter()
        .map(|&dw| rate_at(base, dw))
        .collect()
}

fn rate_at(base: &SpectralParams, dw: f64) -> Result<f64, SpectralError> {
    let p = base.with_delta_omega(dw);
    dominant_rate(&p, &SearchWindow::default_for(&p))
}

/// A zero of `U(Δω)` located by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCrossing {
    pub delta_omega: f64,
    /// `+1` when `U` becomes positive with increasing `Δω`, `-1` otherwise.
    pub direction: i8,
}

/// Brackets sign changes of `U` between neighbouring grid points (using the
/// precomputed `rates`) and refines each to `tol`.
pub fn rate_sign_changes(
    base: &SpectralParams,
    grid: &[f64],
    rates: &[f64],
    tol: f64,
) -> Result<Vec<RateCrossing>, SpectralError> {
    let brackets: Vec<(f64, f64, f64)> = grid
        .windows(2)
        .zip(rates.windows(2))
        .filter(|(_, r)| r[0] != 0.0 && r[1] != 0.0 && r[0].signum() != r[1].signum())
        .map(|(g, r)| (g[0], g[1], r[0]))
        .collect();
    brackets
        .par_iter()
        .map(|&(mut a, mut b, fa)| {
            let sa = fa.signum();
            while b - a > tol {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = rate_at(base, m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == sa {
                    a = m
                } else {
                    b = m
                }
            }
            Ok(RateCrossing {
                delta_omega: 0.5 * (a + b),
                direction: if sa < 0.0 { 1 } else { -1 },
            })
        })
        .collect()
}
