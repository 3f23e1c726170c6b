use num_complex::Complex64;

use super::{c, coupling_phase, MinimalParams, ModelError, PhaseSign};
use crate::dde::DelaySystem;
use crate::spectral::SweepVariant;

/// Lang-Kobayashi parameters for two identical, mutually delay-coupled lasers.
///
/// Times in ns, rates in 1/ns. Carrier densities are excess values above
/// threshold in arbitrary units; `gain` is per unit of that density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkParams {
    /// Linewidth enhancement factor.
    pub alpha: f64,
    pub gain: f64,
    /// Dimensionless feedback strength `𝒦`; the coupling rate is `𝒦/τ_in`.
    pub feedback: f64,
    pub tau_in: f64,
    pub tau_p: f64,
    pub tau_s: f64,
    pub pump1: f64,
    pub pump2: f64,
    pub n_th: f64,
    pub delta_omega: f64,
    pub tau: f64,
    pub variant: SweepVariant,
    pub omega_fixed: f64,
    pub phase_sign: PhaseSign,
}

impl Default for LkParams {
    /// 10 ps photon lifetime, 1 ns carrier lifetime, 1 ps round trip, pumps 3%
    /// above threshold and `N_th` scaled so the solitary intensity is 1.
    fn default() -> Self {
        let tau_p = 0.01;
        let tau_s = 1.0;
        let pump_ratio = 1.03;
        let n_th = tau_s / ((pump_ratio - 1.0) * tau_p);
        let pump = pump_ratio * n_th / tau_s;
        Self {
            alpha: 5.0,
            gain: 100.0,
            feedback: 0.0,
            tau_in: 0.001,
            tau_p,
            tau_s,
            pump1: pump,
            pump2: pump,
            n_th,
            delta_omega: 0.0,
            tau: 0.0,
            variant: SweepVariant::SymmetricLTau,
            omega_fixed: 0.0,
            phase_sign: PhaseSign::Plus,
        }
    }
}

impl LkParams {
    /// Default laser with the feedback chosen so that `𝒦/τ_in = kappa`.
    pub fn with_coupling(kappa: f64, tau: f64, delta_omega: f64, variant: SweepVariant) -> Self {
        let base = Self::default();
        Self {
            feedback: kappa * base.tau_in,
            tau,
            delta_omega,
            variant,
            ..base
        }
    }

    /// Coupling rate `κ = 𝒦/τ_in`.
    pub fn kappa(&self) -> f64 {
        self.feedback / self.tau_in
    }

    pub fn set_kappa(&mut self, kappa: f64) {
        self.feedback = kappa * self.tau_in;
    }

    /// Sets both pumps to `ratio` times the threshold current `N_th/τ_s`.
    pub fn set_pump_ratio(&mut self, ratio: f64) {
        let j = ratio * self.n_th / self.tau_s;
        self.pump1 = j;
        self.pump2 = j;
    }

    /// Uncoupled steady intensity `τ_p·(J - N_th/τ_s)` at `N = 0`.
    pub fn solitary_intensity(&self, pump: f64) -> f64 {
        self.tau_p * (pump - self.n_th / self.tau_s)
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

    /// Centre frequency `ω₀` implied by the sweep variant; for the symmetric
    /// sweep the smallest non-negative value with `e^{iω₀τ} = ±1`.
    pub fn omega0(&self) -> f64 {
        match self.variant {
            SweepVariant::FixedSecondLaser => self.omega_fixed + self.delta_omega,
            SweepVariant::SymmetricLTau => match self.phase_sign {
                PhaseSign::Plus => 0.0,
                PhaseSign::Minus if self.tau > 0.0 => std::f64::consts::PI / self.tau,
                PhaseSign::Minus => 0.0,
            },
        }
    }

    /// The field equations at `N = 0` as a linear model.
    pub fn minimal(&self) -> MinimalParams {
        MinimalParams {
            delta_omega: self.delta_omega,
            kappa: self.kappa(),
            tau: self.tau,
            variant: self.variant,
            omega_fixed: self.omega_fixed,
            phase_sign: self.phase_sign,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidParams(m));
        let all = [
            self.alpha,
            self.gain,
            self.feedback,
            self.tau_in,
            self.tau_p,
            self.tau_s,
            self.pump1,
            self.pump2,
            self.n_th,
            self.delta_omega,
            self.tau,
            self.omega_fixed,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.tau_in <= 0.0 || self.tau_p <= 0.0 || self.tau_s <= 0.0 {
            return bad(format!(
                "lifetimes must be positive (tau_in={}, tau_p={}, tau_s={})",
                self.tau_in, self.tau_p, self.tau_s
            ));
        }
        if self.feedback < 0.0 {
            return bad(format!("feedback must be >= 0, got {}", self.feedback));
        }
        if self.tau < 0.0 {
            return bad(format!("tau must be >= 0, got {}", self.tau));
        }
        Ok(())
    }
}

/// Two complex fields and two excess carrier densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkState {
    pub e1: Complex64,
    pub e2: Complex64,
    pub n1: f64,
    pub n2: f64,
}

impl LkState {
    pub fn to_array(self) -> [f64; 6] {
        [self.e1.re, self.e1.im, self.e2.re, self.e2.im, self.n1, self.n2]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            e1: c(x[0], x[1]),
            e2: c(x[2], x[3]),
            n1: x[4],
            n2: x[5],
        }
    }
}

/// The four rate equations:
///
/// ```text
/// E1' = ½(1+iα)G·N1·E1 + iΔω·E1 + (𝒦/τ_in)e^{-iω₀τ}·E2(t-τ)
/// E2' = ½(1+iα)G·N2·E2 - iΔω·E2 + (𝒦/τ_in)e^{-iω₀τ}·E1(t-τ)
/// Nk' = Jk - N_th/τ_s - Nk/τ_s - (1/τ_p + G·Nk)|Ek|²
/// ```
pub fn lk_rhs(_t: f64, s: &LkState, delayed: &LkState, p: &LkParams) -> LkState {
    let k = p.kappa() * p.phase();
    let g = 0.5 * p.gain * c(1.0, p.alpha);
    let i_dw = c(0.0, p.delta_omega);
    LkState {
        e1: g * s.n1 * s.e1 + i_dw * s.e1 + k * delayed.e2,
        e2: g * s.n2 * s.e2 - i_dw * s.e2 + k * delayed.e1,
        n1: p.pump1 - p.n_th / p.tau_s - s.n1 / p.tau_s - (1.0 / p.tau_p + p.gain * s.n1) * s.e1.norm_sqr(),
        n2: p.pump2 - p.n_th / p.tau_s - s.n2 / p.tau_s - (1.0 / p.tau_p + p.gain * s.n2) * s.e2.norm_sqr(),
    }
}

/// [`LkParams`] as a six-dimensional [`DelaySystem`].
#[derive(Debug, Clone, Copy)]
pub struct LkModel {
    pub params: LkParams,
    coupling: Complex64,
    carrier_drive: [f64; 2],
}

impl LkModel {
    pub fn new(params: LkParams) -> Self {
        Self {
            coupling: params.kappa() * params.phase(),
            carrier_drive: [
                params.pump1 - params.n_th / params.tau_s,
                params.pump2 - params.n_th / params.tau_s,
            ],
            params,
        }
    }

    /// Same lasers with instantaneous coupling; the coupling phase is kept.
    pub fn undelayed(&self) -> Self {
        Self {
            params: LkParams {
                tau: 0.0,
                ..self.params
            },
            ..*self
        }
    }
}

impl DelaySystem for LkModel {
    fn dim(&self) -> usize {
        6
    }

    fn delay(&self) -> f64 {
        self.params.tau
    }

    #[inline]
    fn rhs(&self, _t: f64, x: &[f64], xd: &[f64], out: &mut [f64]) {
        let p = &self.params;
        let (kr, ki) = (self.coupling.re, self.coupling.im);
        let dw = p.delta_omega;
        let half_g = 0.5 * p.gain;

        let (a1, b1, a2, b2) = (x[0], x[1], x[2], x[3]);
        let (n1, n2) = (x[4], x[5]);
        let (da1, db1, da2, db2) = (xd[0], xd[1], xd[2], xd[3]);

        // ½(1+iα)G·N·E + iΔω·E
        let g1 = half_g * n1;
        let g2 = half_g * n2;
        let w1 = p.alpha * g1 + dw;
        let w2 = p.alpha * g2 - dw;
        out[0] = g1 * a1 - w1 * b1 + kr * da2 - ki * db2;
        out[1] = g1 * b1 + w1 * a1 + kr * db2 + ki * da2;
        out[2] = g2 * a2 - w2 * b2 + kr * da1 - ki * db1;
        out[3] = g2 * b2 + w2 * a2 + kr * db1 + ki * da1;

        let i1 = a1 * a1 + b1 * b1;
        let i2 = a2 * a2 + b2 * b2;
        out[4] = self.carrier_drive[0] - n1 / p.tau_s - (1.0 / p.tau_p + p.gain * n1) * i1;
        out[5] = self.carrier_drive[1] - n2 / p.tau_s - (1.0 / p.tau_p + p.gain * n2) * i2;
    }
}
