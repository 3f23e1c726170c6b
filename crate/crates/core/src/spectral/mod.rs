//! Spectrum of the delay-coupled two-mode Liouvillian.
//!
//! Eigenmodes `E(t) = e^{λt}·E(0)` of
//!
//! ```text
//! ∂t E1 = iΔω·E1(t) + κφ·E2(t-τ)
//! ∂t E2 = -iΔω·E2(t) + κφ·E1(t-τ)
//! ```
//!
//! satisfy `λ² + Δω² - κ²φ²·e^{-2λτ} = 0`. For the symmetric sweep `φ² = 1`;
//! when the second laser is held at a fixed frequency the phase becomes
//! `φ = e^{-i(ω₂+Δω)τ}` and the spectrum loses its conjugation symmetry.
//!
//! Rates are in 1/ns, angular frequencies in rad/ns and times in ns.

mod closed_form;
mod roots;
mod sweep;

use num_complex::Complex64;
use thiserror::Error;

pub use closed_form::{
    central_dome_rate, g_double_zeros, markovian_eigenvalues, sow_exact_difference,
    sow_predicted, sow_report, transition_detunings, SowReportRow, DOUBLE_ZERO_THRESHOLD,
};
pub use roots::{dominant_rate, find_eigenvalues, winding_number};
pub use sweep::{dominant_rate_curve, rate_sign_changes, RateCrossing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid search window: {0}")]
    InvalidWindow(String),
    #[error("operation requires the symmetric sweep variant")]
    WrongVariant,
    #[error("Newton refinement failed near {count} flagged cells (found {found}, winding number {winding})")]
    NonConvergence {
        count: usize,
        found: usize,
        winding: i64,
    },
    #[error("root at {u} + {v}i lies on the window boundary; enlarge the window")]
    RootOnBoundary { u: f64, v: f64 },
    #[error("no eigenvalue inside the search window")]
    Empty,
}

/// How the two laser frequencies move when the detuning is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariant {
    /// `ω₁,₂ = ω₀ ± Δω` with `e^{iω₀τ} = ±1` held fixed.
    SymmetricLTau,
    /// `ω₂` held fixed while `ω₁` is swept.
    FixedSecondLaser,
}

impl SweepVariant {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariant::SymmetricLTau => "symmetric",
            SweepVariant::FixedSecondLaser => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "symmetric_ltau" | "ltau" | "l_tau" => Some(SweepVariant::SymmetricLTau),
            "fixed" | "fixed_second_laser" | "lexp" | "l_exp" => {
                Some(SweepVariant::FixedSecondLaser)
            }
            _ => None,
        }
    }
}

impl std::fmt::Display for SweepVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One instance of the delayed Liouvillian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub delta_omega: f64,
    pub kappa: f64,
    pub tau: f64,
    pub variant: SweepVariant,
    /// Fixed second-laser frequency `ω₂`; only read by
    /// [`SweepVariant::FixedSecondLaser`].
    pub omega_fixed: f64,
}

impl SpectralParams {
    pub fn new(
        delta_omega: f64,
        kappa: f64,
        tau: f64,
        variant: SweepVariant,
        omega_fixed: f64,
    ) -> Result<Self, SpectralError> {
        let p = Self {
            delta_omega,
            kappa,
            tau,
            variant,
            omega_fixed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(delta_omega: f64, kappa: f64, tau: f64) -> Self {
        Self {
            delta_omega,
            kappa,
            tau,
            variant: SweepVariant::SymmetricLTau,
            omega_fixed: 0.0,
        }
    }

    pub fn fixed_second_laser(delta_omega: f64, kappa: f64, tau: f64, omega_fixed: f64) -> Self {
        Self {
            delta_omega,
            kappa,
            tau,
            variant: SweepVariant::FixedSecondLaser,
            omega_fixed,
        }
    }

    pub fn with_delta_omega(mut self, delta_omega: f64) -> Self {
        self.delta_omega = delta_omega;
        self
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(SpectralError::InvalidParams(format!(
                "kappa must be finite and >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(SpectralError::InvalidParams(format!(
                "tau must be finite and >= 0, got {}",
                self.tau
            )));
        }
        if !self.delta_omega.is_finite() {
            return Err(SpectralError::InvalidParams(
                "delta_omega must be finite".into(),
            ));
        }
        if !self.omega_fixed.is_finite() {
            return Err(SpectralError::InvalidParams(
                "omega_fixed must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Squared coupling phase `φ²` multiplying `κ²e^{-2λτ}`.
    pub fn phase_sq(&self) -> Complex64 {
        match self.variant {
            SweepVariant::SymmetricLTau => Complex64::new(1.0, 0.0),
            SweepVariant::FixedSecondLaser => {
                Complex64::from_polar(1.0, -2.0 * (self.omega_fixed + self.delta_omega) * self.tau)
            }
        }
    }

    /// Natural rate scale `max(κ, 1/τ)`, used for tolerances.
    pub fn rate_scale(&self) -> f64 {
        let inv_tau = if self.tau > 0.0 { 1.0 / self.tau } else { 0.0 };
        self.kappa.max(inv_tau).max(self.delta_omega.abs()).max(f64::MIN_POSITIVE)
    }
}

/// A characteristic root `λ = u + iv` together with its residual `|f(λ)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub u: f64,
    pub v: f64,
    pub residual: f64,
}

impl Eigenvalue {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub(crate) fn certified(lambda: Complex64, p: &SpectralParams) -> Self {
        Self {
            u: lambda.re,
            v: lambda.im,
            residual: char_residual(lambda, p).norm(),
        }
    }
}

/// Rectangle of the complex plane searched for roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Side length of the coarse scan cells.
    pub seed_spacing: f64,
}

impl SearchWindow {
    pub fn new(
        u_min: f64,
        u_max: f64,
        v_min: f64,
        v_max: f64,
        seed_spacing: f64,
    ) -> Result<Self, SpectralError> {
        let w = Self {
            u_min,
            u_max,
            v_min,
            v_max,
            seed_spacing,
        };
        w.validate(0.0)?;
        Ok(w)
    }

    /// Window wide enough to contain every root with `u ≥ 0`:
    /// `u ∈ [-3κ - 2/τ, 2κ]`, `|v| ≤ |Δω| + 4π/τ`.
    pub fn default_for(p: &SpectralParams) -> Self {
        let k = p.kappa;
        let dw = p.delta_omega.abs();
        if p.tau == 0.0 {
            let r = 2.0 * k.max(dw).max(1e-12);
            return Self {
                u_min: -r,
                u_max: r,
                v_min: -r,
                v_max: r,
                seed_spacing: r / 32.0,
            };
        }
        let tau = p.tau;
        let u_min = -3.0 * k - 2.0 / tau;
        let u_max = 2.0 * k.max(1e-3 / tau);
        let v_ext = (dw + 4.0 * std::f64::consts::PI / tau).max((dw * dw + k * k).sqrt() + 1.0 / tau);
        let spacing = (std::f64::consts::PI / (8.0 * tau)).min((u_max - u_min) / 48.0);
        Self {
            u_min,
            u_max,
            v_min: -v_ext,
            v_max: v_ext,
            seed_spacing: spacing,
        }
    }

    /// Checks ordering, and the seed-spacing bound `π/(4τ)` when `τ > 0`.
    pub fn validate(&self, tau: f64) -> Result<(), SpectralError> {
        let finite = [self.u_min, self.u_max, self.v_min, self.v_max, self.seed_spacing]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(SpectralError::InvalidWindow("non-finite bound".into()));
        }
        if self.u_min >= self.u_max || self.v_min >= self.v_max {
            return Err(SpectralError::InvalidWindow(format!(
                "empty window u=[{}, {}] v=[{}, {}]",
                self.u_min, self.u_max, self.v_min, self.v_max
            )));
        }
        if self.seed_spacing <= 0.0 {
            return Err(SpectralError::InvalidWindow(
                "seed spacing must be positive".into(),
            ));
        }
        if tau > 0.0 && self.seed_spacing > std::f64::consts::PI / (4.0 * tau) {
            return Err(SpectralError::InvalidWindow(format!(
                "seed spacing {} exceeds pi/(4 tau) = {}",
                self.seed_spacing,
                std::f64::consts::PI / (4.0 * tau)
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.u_min && z.re <= self.u_max && z.im >= self.v_min && z.im <= self.v_max
    }

    pub(crate) fn boundary_distance(&self, z: Complex64) -> f64 {
        (z.re - self.u_min)
            .min(self.u_max - z.re)
            .min(z.im - self.v_min)
            .min(self.v_max - z.im)
    }
}

/// `f(λ) = λ² + Δω² - κ²φ²·e^{-2λτ}`.
pub fn char_residual(lambda: Complex64, p: &SpectralParams) -> Complex64 {
    let k2 = p.kappa * p.kappa;
    lambda * lambda + p.delta_omega * p.delta_omega - k2 * p.phase_sq() * (-2.0 * p.tau * lambda).exp()
}

/// `f'(λ) = 2λ + 2τκ²φ²·e^{-2λτ}`.
pub(crate) fn char_derivative(lambda: Complex64, p: &SpectralParams) -> Complex64 {
    let k2 = p.kappa * p.kappa;
    2.0 * lambda + 2.0 * p.tau * k2 * p.phase_sq() * (-2.0 * p.tau * lambda).exp()
}

/// `F(u, v) = u² - v² + Δω² - κ²e^{-2uτ}cos(2vτ)`, the real part of the
/// symmetric characteristic function.
pub fn contour_f(u: f64, v: f64, p: &SpectralParams) -> Result<f64, SpectralError> {
    if p.variant != SweepVariant::SymmetricLTau {
        return Err(SpectralError::WrongVariant);
    }
    let k2 = p.kappa * p.kappa;
    Ok(u * u - v * v + p.delta_omega * p.delta_omega
        - k2 * (-2.0 * u * p.tau).exp() * (2.0 * v * p.tau).cos())
}

/// `G(u, v) = 2uv + κ²e^{-2uτ}sin(2vτ)`, the imaginary part.
pub fn contour_g(u: f64, v: f64, p: &SpectralParams) -> Result<f64, SpectralError> {
    if p.variant != SweepVariant::SymmetricLTau {
        return Err(SpectralError::WrongVariant);
    }
    let k2 = p.kappa * p.kappa;
    Ok(2.0 * u * v + k2 * (-2.0 * u * p.tau).exp() * (2.0 * v * p.tau).sin())
}
