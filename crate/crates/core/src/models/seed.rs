//! Initial functions on `[-τ, 0]`.
//!
//! Delay runs start from a solution of the same system with the delay
//! switched off, so the first `τ` of the real run is not dominated by an
//! arbitrary constant history.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{c, LkModel, LkParams, MinimalParams, ModelError};
use crate::dde::{History, Integrator, SampledHistory};

/// How a history was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedSource {
    /// The undelayed run settled after `t` ns.
    Settled { t: f64 },
    /// Linear flow `e^{L₀t}(1, 1)` of the undelayed minimal model.
    Exponential,
    /// Constant unit fields; the undelayed minimal model has no bounded orbit.
    ConstantUnit,
}

/// Settling test: relative change of consecutive window averages.
const SETTLE_TOLERANCE: f64 = 1e-6;
const SETTLE_WINDOW: f64 = 1.0;
const PERTURBATION: f64 = 1e-3;

/// Seeds a Lang-Kobayashi run.
///
/// Starts at the solitary fixed point with random field phases and a small
/// random perturbation, integrates the undelayed system in 1 ns chunks and
/// stops once the Hann-weighted mean intensity of both lasers changes by less
/// than `1e-6` (relative) between chunks. The trailing `τ` of that run, shifted
/// to end at `t = 0`, becomes the history.
///
/// Fails with [`ModelError::SeedDivergence`] after `t_max` ns; the error
/// carries the last segment so callers may continue anyway.
pub fn seed_history(
    p: &LkParams,
    h: f64,
    rng_seed: u64,
    t_max: f64,
) -> Result<(SampledHistory, SeedSource), ModelError> {
    p.validate()?;
    let model = LkModel::new(*p).undelayed();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut start = [0.0; 6];
    for (k, pump) in [p.pump1, p.pump2].into_iter().enumerate() {
        let amp = p.solitary_intensity(pump).max(0.0).sqrt().max(PERTURBATION);
        let e = Complex64::from_polar(
            amp * (1.0 + PERTURBATION * rng.gen_range(-1.0..1.0)),
            rng.gen_range(0.0..TAU),
        );
        start[2 * k] = e.re;
        start[2 * k + 1] = e.im;
        start[4 + k] = PERTURBATION * rng.gen_range(-1.0..1.0) / (p.gain * p.tau_p);
    }
    let history = crate::dde::ConstantHistory(start.to_vec());
    let mut integ = Integrator::with_memory(&model, &history, h, p.tau)?;

    let mut prev: Option<[f64; 2]> = None;
    let mut drift = f64::INFINITY;
    let mut t_end = 0.0;
    while t_end < t_max {
        t_end += SETTLE_WINDOW;
        let t0 = integ.time();
        let mut acc = HannMean::new(t0, t_end);
        integ.run_until(t_end, |t, x| acc.add(t, [x[0] * x[0] + x[1] * x[1], x[2] * x[2] + x[3] * x[3]]))?;
        let now = acc.finish();
        if let Some(last) = prev {
            drift = (0..2)
                .map(|k| (now[k] - last[k]).abs() / now[k].abs().max(last[k].abs()).max(1e-300))
                .fold(0.0, f64::max);
            if drift < SETTLE_TOLERANCE {
                let hist = integ.export_history(integ.time() - p.tau);
                return Ok((hist, SeedSource::Settled { t: integ.time() }));
            }
        }
        prev = Some(now);
    }
    Err(ModelError::SeedDivergence {
        t_max,
        drift,
        fallback: Box::new(integ.export_history(integ.time() - p.tau)),
    })
}

/// Running Hann-weighted mean over a known interval.
pub(crate) struct HannMean {
    t0: f64,
    len: f64,
    sum: [f64; 2],
    weight: f64,
}

impl HannMean {
    pub(crate) fn new(t0: f64, t1: f64) -> Self {
        Self { t0, len: t1 - t0, sum: [0.0; 2], weight: 0.0 }
    }

    pub(crate) fn add(&mut self, t: f64, v: [f64; 2]) {
        let s = ((t - self.t0) / self.len).clamp(0.0, 1.0);
        let w = 0.5 - 0.5 * (TAU * s).cos();
        self.sum[0] += w * v[0];
        self.sum[1] += w * v[1];
        self.weight += w;
    }

    pub(crate) fn finish(&self) -> [f64; 2] {
        if self.weight > 0.0 {
            [self.sum[0] / self.weight, self.sum[1] / self.weight]
        } else {
            [f64::NAN; 2]
        }
    }
}

/// History for the minimal model, evaluated in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalHistory {
    generator: [[Complex64; 2]; 2],
    mu: Complex64,
    exponential: bool,
}

impl MinimalHistory {
    fn fields(&self, t: f64) -> [Complex64; 2] {
        let one = c(1.0, 0.0);
        if !self.exponential {
            return [one, one];
        }
        // e^{L₀t} = cosh(μt)·I + sinh(μt)/μ·L₀ with μ² = κ²φ² - Δω².
        let mt = self.mu * t;
        let sinc = if self.mu.norm() * t.abs() < 1e-8 {
            c(t, 0.0)
        } else {
            mt.sinh() / self.mu
        };
        let ch = mt.cosh();
        let l = &self.generator;
        [ch + sinc * (l[0][0] + l[0][1]), ch + sinc * (l[1][0] + l[1][1])]
    }

    fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let l = &self.generator;
        [l[0][0] * v[0] + l[0][1] * v[1], l[1][0] * v[0] + l[1][1] * v[1]]
    }
}

impl History for MinimalHistory {
    fn value(&self, t: f64, out: &mut [f64]) {
        let e = self.fields(t);
        out[..4].copy_from_slice(&[e[0].re, e[0].im, e[1].re, e[1].im]);
    }

    fn derivative(&self, t: f64, _step: f64, out: &mut [f64]) {
        let d = if self.exponential {
            self.apply(self.fields(t))
        } else {
            [c(0.0, 0.0); 2]
        };
        out[..4].copy_from_slice(&[d[0].re, d[0].im, d[1].re, d[1].im]);
    }
}

/// Seeds the minimal model with the exact undelayed flow from `(1, 1)` when
/// that flow stays bounded (no coupling, or a purely imaginary spectrum), and
/// with constant unit fields otherwise.
pub fn seed_minimal_history(p: &MinimalParams) -> (MinimalHistory, SeedSource) {
    let phi = p.phase();
    let k = p.kappa * phi;
    let generator = [[c(0.0, p.delta_omega), k], [k, c(0.0, -p.delta_omega)]];
    let mu_sq = k * k - p.delta_omega * p.delta_omega;
    let scale = (p.kappa * p.kappa + p.delta_omega * p.delta_omega).max(1e-300);
    let bounded = p.kappa == 0.0 || (mu_sq.re < 0.0 && mu_sq.im.abs() <= 1e-12 * scale);
    let h = MinimalHistory {
        generator,
        mu: mu_sq.sqrt(),
        exponential: bounded,
    };
    let src = if bounded { SeedSource::Exponential } else { SeedSource::ConstantUnit };
    (h, src)
}
