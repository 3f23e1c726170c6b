//! Concrete delay systems: the linear two-mode model and the Lang-Kobayashi
//! rate equations for two mutually delay-coupled lasers.
//!
//! State vectors are laid out as `[re E1, im E1, re E2, im E2, N1, N2]`; the
//! minimal model uses the first four entries only.

mod lk;
mod minimal;
mod seed;
mod steady;

use num_complex::Complex64;
use thiserror::Error;

use crate::dde::DdeError;
use crate::spectral::SweepVariant;

pub use lk::{lk_rhs, LkModel, LkParams, LkState};
pub use minimal::{minimal_rhs, MinimalModel, MinimalParams};
pub use seed::{seed_history, seed_minimal_history, MinimalHistory, SeedSource};
pub use steady::{
    mean_intensity, point_seed, steady_state_from_history, steady_state_intensity, sweep_detuning,
    Averaging, RunSettings, SteadyState,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Integration(#[from] DdeError),
    #[error("tau = 0 seeding run did not settle within {t_max} ns (last drift {drift:e})")]
    SeedDivergence {
        t_max: f64,
        drift: f64,
        /// Final segment of the unsettled run, usable as a history anyway.
        fallback: Box<crate::dde::SampledHistory>,
    },
}

/// Sign of `e^{iω₀τ}` for the symmetric sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhaseSign {
    #[default]
    Plus,
    Minus,
}

impl PhaseSign {
    pub fn value(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(PhaseSign::Plus)
        } else if v == -1.0 {
            Some(PhaseSign::Minus)
        } else {
            None
        }
    }
}

/// Coupling phase `e^{-iω₀τ}` shared by both models.
///
/// The symmetric sweep pins it to `±1`; with the second laser fixed at
/// `ω₂ = omega_fixed` the centre frequency is `ω₀ = ω₂ + Δω`.
pub fn coupling_phase(
    variant: SweepVariant,
    sign: PhaseSign,
    omega_fixed: f64,
    delta_omega: f64,
    tau: f64,
) -> Complex64 {
    match variant {
        SweepVariant::SymmetricLTau => Complex64::new(sign.value(), 0.0),
        SweepVariant::FixedSecondLaser => {
            Complex64::from_polar(1.0, -(omega_fixed + delta_omega) * tau)
        }
    }
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
