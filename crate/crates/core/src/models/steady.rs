//! Time-averaged steady-state intensities and detuning sweeps.

use rayon::prelude::*;

use super::seed::HannMean;
use super::{seed_history, LkModel, LkParams, ModelError, SeedSource};
use crate::analysis::SweepProfile;
use crate::dde::{History, Integrator, Trajectory};
use crate::spectral::SweepVariant;

/// Weighting of samples inside an averaging window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Plain arithmetic mean.
    #[default]
    Boxcar,
    /// Raised-cosine weights; suppresses the residual of fast intensity beats.
    Hann,
}

impl Averaging {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boxcar" => Some(Averaging::Boxcar),
            "hann" => Some(Averaging::Hann),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Averaging::Boxcar => "boxcar",
            Averaging::Hann => "hann",
        }
    }
}

/// Integration and averaging settings for one steady-state evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    /// RK4 step (ns).
    pub h: f64,
    /// Discarded lead-in (ns).
    pub transient: f64,
    /// Span after the transient that is split into averaging windows (ns).
    pub retained: f64,
    /// Averaging window (ns).
    pub window: f64,
    pub averaging: Averaging,
    pub seed: u64,
    /// Limit for the undelayed seeding run (ns).
    pub max_seed_time: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            h: 1e-4,
            transient: 50.0,
            retained: 10.0,
            window: 1.0,
            averaging: Averaging::Boxcar,
            seed: 0,
            max_seed_time: 200.0,
        }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidParams(m));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("step must be positive, got {}", self.h));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return bad(format!("window must be positive, got {}", self.window));
        }
        if !(self.transient >= 0.0 && self.retained.is_finite()) {
            return bad(format!("transient must be >= 0, got {}", self.transient));
        }
        if !(self.retained >= self.window) {
            return bad(format!(
                "retained span {} must cover at least one window {}",
                self.retained, self.window
            ));
        }
        if !(self.max_seed_time >= 0.0) {
            return bad(format!("max_seed_time must be >= 0, got {}", self.max_seed_time));
        }
        Ok(())
    }

    fn windows(&self) -> usize {
        ((self.retained / self.window) + 1e-9).floor().max(1.0) as usize
    }
}

/// Averaged intensities of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub i1: f64,
    pub i2: f64,
    /// Averaging window (ns).
    pub window: f64,
    /// The last two windows agree to 1% relative.
    pub converged: bool,
    /// Simulated time at the end of the run (ns).
    pub t_end: f64,
    /// Per-window means over the retained span, oldest first.
    pub window_means: Vec<[f64; 2]>,
    pub seed_source: Option<SeedSource>,
    /// The seeding run did not settle and its last segment was used anyway.
    pub seed_fallback: bool,
}

const CONVERGENCE_TOLERANCE: f64 = 0.01;

/// Seeds, integrates and averages one LK configuration.
///
/// A seeding run that does not settle is not fatal: its last segment is used
/// and [`SteadyState::seed_fallback`] is set.
pub fn steady_state_intensity(p: &LkParams, run: &RunSettings) -> Result<SteadyState, ModelError> {
    p.validate()?;
    run.validate()?;
    let (history, source, fallback) = match seed_history(p, run.h, run.seed, run.max_seed_time) {
        Ok((h, s)) => (h, Some(s), false),
        Err(ModelError::SeedDivergence { t_max, drift, fallback }) => {
            log::debug!(
                "seeding at delta_omega={} did not settle in {t_max} ns (drift {drift:.2e}); using last segment",
                p.delta_omega
            );
            (*fallback, None, true)
        }
        Err(e) => return Err(e),
    };
    let mut s = steady_state_from_history(p, &history, run)?;
    s.seed_source = source;
    s.seed_fallback = fallback;
    Ok(s)
}

/// Like [`steady_state_intensity`] but from a caller-supplied history.
pub fn steady_state_from_history(
    p: &LkParams,
    history: &dyn History,
    run: &RunSettings,
) -> Result<SteadyState, ModelError> {
    p.validate()?;
    run.validate()?;
    let model = LkModel::new(*p);
    let mut integ = Integrator::new(&model, history, run.h)?;
    let n_windows = run.windows();
    let mut extended = false;
    loop {
        let lead_in = integ.time() + run.transient;
        integ.run_until(lead_in, |_, _| {})?;
        let mut means = Vec::with_capacity(n_windows);
        for _ in 0..n_windows {
            let t0 = integ.time();
            let t1 = t0 + run.window;
            let m = match run.averaging {
                Averaging::Hann => {
                    let mut acc = HannMean::new(t0, t1);
                    integ.run_until(t1, |t, x| acc.add(t, intensities(x)))?;
                    acc.finish()
                }
                Averaging::Boxcar => {
                    let mut sum = [0.0; 2];
                    let mut n = 0usize;
                    integ.run_until(t1, |_, x| {
                        let i = intensities(x);
                        sum[0] += i[0];
                        sum[1] += i[1];
                        n += 1;
                    })?;
                    [sum[0] / n.max(1) as f64, sum[1] / n.max(1) as f64]
                }
            };
            means.push(m);
        }
        let last = means[means.len() - 1];
        let converged = match means.len() {
            1 => true,
            n => {
                let prev = means[n - 2];
                (0..2).all(|k| {
                    let scale = last[k].abs().max(prev[k].abs());
                    scale == 0.0 || (last[k] - prev[k]).abs() <= CONVERGENCE_TOLERANCE * scale
                })
            }
        };
        if converged || extended {
            return Ok(SteadyState {
                i1: last[0],
                i2: last[1],
                window: run.window,
                converged,
                t_end: integ.time(),
                window_means: means,
                seed_source: None,
                seed_fallback: false,
            });
        }
        extended = true;
    }
}

#[inline]
fn intensities(x: &[f64]) -> [f64; 2] {
    [x[0] * x[0] + x[1] * x[1], x[2] * x[2] + x[3] * x[3]]
}

/// Boxcar mean of `|E1|²`, `|E2|²` over samples with `t > t_last - window`.
pub fn mean_intensity(traj: &Trajectory, window: f64) -> [f64; 2] {
    if traj.is_empty() {
        return [f64::NAN; 2];
    }
    let t_last = traj.time(traj.len() - 1);
    let mut sum = [0.0; 2];
    let mut n = 0usize;
    for (t, x) in traj.iter() {
        if t > t_last - window - 1e-12 * window && x.len() >= 4 {
            let i = intensities(x);
            sum[0] += i[0];
            sum[1] += i[1];
            n += 1;
        }
    }
    [sum[0] / n as f64, sum[1] / n as f64]
}

/// Mixes the sweep seed with the grid index (SplitMix64 finaliser).
pub fn point_seed(global: u64, index: usize) -> u64 {
    let mut z = global ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs [`steady_state_intensity`] at every detuning, in parallel on the
/// current rayon pool. Each point gets its own seed from
/// `(index, run.seed)`; failures are kept in the profile.
pub fn sweep_detuning(
    base: &LkParams,
    detunings: &[f64],
    variant: SweepVariant,
    run: &RunSettings,
) -> SweepProfile {
    let results: Vec<Result<SteadyState, ModelError>> = detunings
        .par_iter()
        .enumerate()
        .map(|(i, &dw)| {
            let p = LkParams { delta_omega: dw, variant, ..*base };
            let r = RunSettings { seed: point_seed(run.seed, i), ..*run };
            steady_state_intensity(&p, &r)
        })
        .collect();
    SweepProfile::from_results(detunings, results, base.kappa(), base.tau, variant)
}
