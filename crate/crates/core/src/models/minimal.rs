use num_complex::Complex64;

use super::{c, coupling_phase, ModelError, PhaseSign};
use crate::dde::DelaySystem;
use crate::spectral::{SpectralParams, SweepVariant};

/// Parameters of the linear two-mode model; same meaning as
/// [`SpectralParams`] plus the sign of the symmetric phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalParams {
    pub delta_omega: f64,
    pub kappa: f64,
    pub tau: f64,
    pub variant: SweepVariant,
    pub omega_fixed: f64,
    pub phase_sign: PhaseSign,
}

impl MinimalParams {
    pub fn symmetric(delta_omega: f64, kappa: f64, tau: f64) -> Self {
        Self {
            delta_omega,
            kappa,
            tau,
            variant: SweepVariant::SymmetricLTau,
            omega_fixed: 0.0,
            phase_sign: PhaseSign::Plus,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.spectral()
            .validate()
            .map_err(|e| ModelError::InvalidParams(e.to_string()))
    }

    pub fn spectral(&self) -> SpectralParams {
        SpectralParams {
            delta_omega: self.delta_omega,
            kappa: self.kappa,
            tau: self.tau,
            variant: self.variant,
            omega_fixed: self.omega_fixed,
        }
    }

    pub fn phase(&self) -> Complex64 {
        coupling_phase(
            self.variant,
            self.phase_sign,
            self.omega_fixed,
            self.delta_omega,
            self.tau,
        )
    }
}

impl From<&SpectralParams> for MinimalParams {
    fn from(p: &SpectralParams) -> Self {
        Self {
            delta_omega: p.delta_omega,
            kappa: p.kappa,
            tau: p.tau,
            variant: p.variant,
            omega_fixed: p.omega_fixed,
            phase_sign: PhaseSign::Plus,
        }
    }
}

/// `(iΔω·E1 + κφ·E2(t-τ), -iΔω·E2 + κφ·E1(t-τ))`.
pub fn minimal_rhs(
    _t: f64,
    state: [Complex64; 2],
    delayed: [Complex64; 2],
    p: &MinimalParams,
) -> [Complex64; 2] {
    let i_dw = c(0.0, p.delta_omega);
    let k = p.kappa * p.phase();
    [
        i_dw * state[0] + k * delayed[1],
        -i_dw * state[1] + k * delayed[0],
    ]
}

/// [`MinimalParams`] as a [`DelaySystem`] on `[re E1, im E1, re E2, im E2]`.
#[derive(Debug, Clone, Copy)]
pub struct MinimalModel {
    pub params: MinimalParams,
    phase: Complex64,
}

impl MinimalModel {
    pub fn new(params: MinimalParams) -> Self {
        Self {
            phase: params.phase(),
            params,
        }
    }
}

impl DelaySystem for MinimalModel {
    fn dim(&self) -> usize {
        4
    }

    fn delay(&self) -> f64 {
        self.params.tau
    }

    fn rhs(&self, _t: f64, x: &[f64], xd: &[f64], out: &mut [f64]) {
        let dw = self.params.delta_omega;
        let k = self.params.kappa * self.phase;
        let e1 = c(x[0], x[1]);
        let e2 = c(x[2], x[3]);
        let d1 = c(xd[0], xd[1]);
        let d2 = c(xd[2], xd[3]);
        let r1 = c(0.0, dw) * e1 + k * d2;
        let r2 = c(0.0, -dw) * e2 + k * d1;
        out[0] = r1.re;
        out[1] = r1.im;
        out[2] = r2.re;
        out[3] = r2.im;
    }
}
