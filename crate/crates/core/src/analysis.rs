//! Sweep profiles and their observables: normalisation, dome edge and the
//! sideband oscillation width (SOW), the period in `Δω` of the intensity
//! ripples outside the dome.

use std::f64::consts::PI;
use std::io::{self, Write};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::models::{ModelError, SteadyState};
use crate::spectral::SweepVariant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("profile is empty or has mismatched columns")]
    Empty,
    #[error("detuning grid must be strictly increasing")]
    UnsortedGrid,
    #[error("grid reaches |delta_omega| = {reach}, needs more than {needed} to normalise")]
    InsufficientRange { reach: f64, needed: f64 },
    #[error("only {found:.1} sidebands beyond the dome edge, need at least {needed}")]
    TooFewSidebands { found: f64, needed: usize },
    #[error("no sideband peak: spectrum maximum is {ratio:.2}x the median")]
    NoPeak { ratio: f64 },
    #[error("fit needs at least one point with finite positive uncertainty")]
    DegenerateFit,
}

/// Which laser's intensity to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Channel {
    #[default]
    First,
    Second,
}

/// Steady-state intensities on a detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepProfile {
    pub delta_omega: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    /// Filled by [`normalize_profile`].
    pub i1_norm: Option<Vec<f64>>,
    pub i2_norm: Option<Vec<f64>>,
    /// Divisors used for `i1_norm` and `i2_norm`.
    pub norm: Option<[f64; 2]>,
    pub converged: Vec<bool>,
    /// Per-point failure message; the intensities of a failed point are NaN.
    pub errors: Vec<Option<String>>,
    pub kappa: f64,
    pub tau: f64,
    pub variant: SweepVariant,
}

impl SweepProfile {
    pub fn new(
        delta_omega: Vec<f64>,
        i1: Vec<f64>,
        i2: Vec<f64>,
        kappa: f64,
        tau: f64,
        variant: SweepVariant,
    ) -> Self {
        let n = delta_omega.len();
        Self {
            delta_omega,
            i1,
            i2,
            i1_norm: None,
            i2_norm: None,
            norm: None,
            converged: vec![true; n],
            errors: vec![None; n],
            kappa,
            tau,
            variant,
        }
    }

    pub fn from_results(
        detunings: &[f64],
        results: Vec<Result<SteadyState, ModelError>>,
        kappa: f64,
        tau: f64,
        variant: SweepVariant,
    ) -> Self {
        let mut p = Self::new(detunings.to_vec(), Vec::new(), Vec::new(), kappa, tau, variant);
        p.converged.clear();
        p.errors.clear();
        for r in results {
            match r {
                Ok(s) => {
                    p.i1.push(s.i1);
                    p.i2.push(s.i2);
                    p.converged.push(s.converged);
                    p.errors.push(None);
                }
                Err(e) => {
                    p.i1.push(f64::NAN);
                    p.i2.push(f64::NAN);
                    p.converged.push(false);
                    p.errors.push(Some(e.to_string()));
                }
            }
        }
        p
    }

    pub fn len(&self) -> usize {
        self.delta_omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_omega.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.errors.iter().filter(|e| e.is_some()).count()
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let n = self.len();
        if n == 0 || self.i1.len() != n || self.i2.len() != n {
            return Err(AnalysisError::Empty);
        }
        if self.delta_omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AnalysisError::UnsortedGrid);
        }
        Ok(())
    }

    /// Normalised channel if present, raw otherwise.
    pub fn channel(&self, ch: Channel) -> &[f64] {
        match ch {
            Channel::First => self.i1_norm.as_deref().unwrap_or(&self.i1),
            Channel::Second => self.i2_norm.as_deref().unwrap_or(&self.i2),
        }
    }

    /// `delta_omega,I1,I2,I1_norm,I2_norm,converged`, then `# key=value` lines.
    pub fn write_csv<W: Write>(&self, mut w: W, extra: &[(String, String)]) -> io::Result<()> {
        writeln!(w, "delta_omega,I1,I2,I1_norm,I2_norm,converged")?;
        for i in 0..self.len() {
            let n1 = self.i1_norm.as_ref().map_or(f64::NAN, |v| v[i]);
            let n2 = self.i2_norm.as_ref().map_or(f64::NAN, |v| v[i]);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.delta_omega[i], self.i1[i], self.i2[i], n1, n2, self.converged[i]
            )?;
        }
        writeln!(w, "# kappa={}", self.kappa)?;
        writeln!(w, "# tau={}", self.tau)?;
        writeln!(w, "# variant={}", self.variant)?;
        if let Some([a, b]) = self.norm {
            writeln!(w, "# norm_I1={a}")?;
            writeln!(w, "# norm_I2={b}")?;
        }
        writeln!(w, "# failed_points={}", self.failures())?;
        for (k, v) in extra {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// Indices of the outer 10% of points by `|Δω|` (at least one).
fn tail_indices(p: &SweepProfile) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p.delta_omega[b].abs().total_cmp(&p.delta_omega[a].abs()));
    let n = (p.len() / 10).max(1);
    idx.truncate(n);
    idx
}

/// Divides each channel by the mean over the outer 10% of the grid.
///
/// Requires `max |Δω| > 2κ`. Failed points stay NaN and are skipped.
pub fn normalize_profile(p: &SweepProfile) -> Result<SweepProfile, AnalysisError> {
    p.validate()?;
    let reach = p.delta_omega.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(reach > 2.0 * p.kappa) {
        return Err(AnalysisError::InsufficientRange { reach, needed: 2.0 * p.kappa });
    }
    let tail = tail_indices(p);
    let mean = |v: &[f64]| {
        let (s, n) = tail
            .iter()
            .map(|&i| v[i])
            .filter(|x| x.is_finite())
            .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        s / n as f64
    };
    let (m1, m2) = (mean(&p.i1), mean(&p.i2));
    let mut out = p.clone();
    out.i1_norm = Some(p.i1.iter().map(|v| v / m1).collect());
    out.i2_norm = Some(p.i2.iter().map(|v| v / m2).collect());
    out.norm = Some([m1, m2]);
    Ok(out)
}

/// Smallest `|Δω|` beyond which the first channel stays inside twice the
/// tail ripple.
///
/// Ripple amplitude is half the peak-to-peak spread of a block of
/// consecutive points ordered by `|Δω|` about the block's own straight-line
/// fit, which keeps slow trends out of it.
/// The reference amplitude `A` comes from the outer 10% of the grid; blocks
/// of 5% of the grid then slide inwards; the point whose inclusion first
/// pushes a block above `2A` is the edge. Amplitudes below `1e-3` of the
/// full profile range never count, so smooth profiles without ripples (the
/// undelayed case) get their edge from the dome itself. Returns 0 for flat
/// profiles.
pub const DOME_RESOLUTION: f64 = 1e-3;

pub fn dome_edge(p: &SweepProfile) -> f64 {
    let x = p.channel(Channel::First);
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| x[i].is_finite()).collect();
    order.sort_by(|&a, &b| p.delta_omega[b].abs().total_cmp(&p.delta_omega[a].abs()));
    let n = order.len();
    if n < 3 {
        return 0.0;
    }
    // Half the peak-to-peak spread about the block's least-squares line.
    let spread = |block: &[usize]| {
        let m = block.len() as f64;
        let mx = block.iter().map(|&i| p.delta_omega[i]).sum::<f64>() / m;
        let my = block.iter().map(|&i| x[i]).sum::<f64>() / m;
        let (sxx, sxy) = block.iter().fold((0.0, 0.0), |(a, b), &i| {
            let dx = p.delta_omega[i] - mx;
            (a + dx * dx, b + dx * (x[i] - my))
        });
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let (lo, hi) = block.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let r = x[i] - my - slope * (p.delta_omega[i] - mx);
            (lo.min(r), hi.max(r))
        });
        0.5 * (hi - lo)
    };
    let tail = &order[..(n / 10).max(2)];
    let amp = spread(tail);
    let (lo, hi) = order
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(x[i]), hi.max(x[i])));
    let floor = DOME_RESOLUTION * (hi - lo);
    if !(hi - lo > 0.0) {
        return 0.0;
    }

    let w = (n / 20).max(2);
    for s in 0..=(n - w) {
        let block = &order[s..s + w];
        if spread(block) > (2.0 * amp).max(floor) {
            // The previous block passed, so the newly added inner point broke it.
            return p.delta_omega[block[w - 1]].abs();
        }
    }
    0.0
}

/// Sideband oscillation width with its FWHM uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SowEstimate {
    /// Oscillation period in `Δω` (rad/ns).
    pub value: f64,
    pub fwhm_error: f64,
    /// Whole periods inside the analysed range.
    pub n_sidebands_used: usize,
    pub dome_edge: f64,
    /// Spectral peak over median magnitude.
    pub peak_ratio: f64,
}

/// Below this many sidebands [`extract_sow`] fails.
pub const MIN_SIDEBANDS: usize = 10;
/// Below this many sidebands [`extract_sow`] logs a warning.
pub const ADVISED_SIDEBANDS: usize = 20;
const ZERO_PAD: usize = 8;
const PEAK_TO_MEDIAN: f64 = 3.0;

/// SOW of the first channel, see [`extract_sow_channel`].
pub fn extract_sow(p: &SweepProfile) -> Result<SowEstimate, AnalysisError> {
    extract_sow_channel(p, Channel::First)
}

/// Fourier estimate of the ripple period beyond the dome.
///
/// Takes the points with `Δω` above [`dome_edge`], resamples them onto a
/// uniform grid if needed, subtracts a least-squares parabola, applies a Hann
/// window and zero-pads 8x before the FFT. The peak is refined by a parabola
/// through the log-magnitudes; the error is the spread of periods across the
/// peak's half-maximum width.
pub fn extract_sow_channel(p: &SweepProfile, ch: Channel) -> Result<SowEstimate, AnalysisError> {
    p.validate()?;
    let edge = dome_edge(p);
    let x = p.channel(ch);
    let pts: Vec<(f64, f64)> = p
        .delta_omega
        .iter()
        .zip(x)
        .filter(|(d, v)| **d > edge && v.is_finite())
        .map(|(d, v)| (*d, *v))
        .collect();
    if pts.len() < 8 {
        return Err(AnalysisError::TooFewSidebands { found: 0.0, needed: MIN_SIDEBANDS });
    }
    let (grid, mut y) = uniform(&pts);
    let step = grid[1] - grid[0];
    let span = grid[grid.len() - 1] - grid[0];
    let level = y.iter().map(|v| v.abs()).sum::<f64>() / y.len() as f64;
    detrend(&grid, &mut y);
    let ripple = (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt();
    if !(ripple > 1e-12 * level) {
        return Err(AnalysisError::NoPeak { ratio: 0.0 });
    }

    let m = y.len();
    let nfft = (m * ZERO_PAD).next_power_of_two();
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); nfft];
    for (i, v) in y.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (m - 1) as f64).cos();
        buf[i] = Complex64::new(w * v, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let mag: Vec<f64> = buf[..nfft / 2].iter().map(|z| z.norm()).collect();
    let df = 1.0 / (nfft as f64 * step);

    // Below two periods across the span the content is trend leakage.
    let lo_bin = ((2.0 / span) / df).ceil() as usize;
    let band = &mag[lo_bin.min(mag.len() - 1)..];
    let (rel, &peak) = band
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(AnalysisError::Empty)?;
    let k = rel + lo_bin;
    let mut sorted = band.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let ratio = if median > 0.0 { peak / median } else { f64::INFINITY };
    if !(ratio >= PEAK_TO_MEDIAN) {
        return Err(AnalysisError::NoPeak { ratio });
    }

    let offset = if k > 0 && k + 1 < mag.len() && mag[k - 1] > 0.0 && mag[k + 1] > 0.0 {
        let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
        let den = a - 2.0 * b + c;
        if den < 0.0 { (0.5 * (a - c) / den).clamp(-0.5, 0.5) } else { 0.0 }
    } else {
        0.0
    };
    let f_peak = (k as f64 + offset) * df;
    let value = 1.0 / f_peak;

    let half = 0.5 * peak;
    let cross = |dir: isize| -> f64 {
        let mut j = k as isize;
        loop {
            let next = j + dir;
            if next < 0 || next as usize >= mag.len() {
                return j as f64;
            }
            let (a, b) = (mag[j as usize], mag[next as usize]);
            if b <= half {
                return j as f64 + dir as f64 * (a - half) / (a - b);
            }
            j = next;
        }
    };
    let f_lo = (cross(-1) * df).max(0.5 * df);
    let f_hi = cross(1) * df;
    let fwhm_error = (1.0 / f_lo - 1.0 / f_hi).max(0.0);

    let found = span / value;
    if found < MIN_SIDEBANDS as f64 {
        return Err(AnalysisError::TooFewSidebands { found, needed: MIN_SIDEBANDS });
    }
    if found < ADVISED_SIDEBANDS as f64 {
        log::warn!("only {found:.2} sidebands beyond the dome edge; {ADVISED_SIDEBANDS} or more advised");
    }
    Ok(SowEstimate {
        value,
        fwhm_error,
        n_sidebands_used: found.floor() as usize,
        dome_edge: edge,
        peak_ratio: ratio,
    })
}

/// Linear resampling onto the median spacing when the grid is uneven.
fn uniform(pts: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut gaps: Vec<f64> = pts.windows(2).map(|w| w[1].0 - w[0].0).collect();
    gaps.sort_by(f64::total_cmp);
    let step = gaps[gaps.len() / 2];
    let even = gaps[gaps.len() - 1] - gaps[0] <= 1e-9 * step;
    if even {
        return pts.iter().map(|&(d, v)| (d, v)).unzip();
    }
    let (a, b) = (pts[0].0, pts[pts.len() - 1].0);
    let n = ((b - a) / step).floor() as usize + 1;
    let mut j = 0;
    (0..n)
        .map(|i| {
            let d = a + i as f64 * step;
            while j + 2 < pts.len() && pts[j + 1].0 < d {
                j += 1;
            }
            let (x0, y0) = pts[j];
            let (x1, y1) = pts[j + 1];
            let t = ((d - x0) / (x1 - x0)).clamp(0.0, 1.0);
            (d, y0 + t * (y1 - y0))
        })
        .unzip()
}

/// Subtracts the least-squares parabola.
fn detrend(x: &[f64], y: &mut [f64]) {
    let n = x.len() as f64;
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let half = 0.5 * (x1 - x0);
    let mid = 0.5 * (x1 + x0);
    // Legendre basis on [-1, 1] keeps the normal equations well conditioned.
    let basis = |v: f64| {
        let s = if half > 0.0 { (v - mid) / half } else { 0.0 };
        [1.0, s, 1.5 * s * s - 0.5]
    };
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (xi, yi) in x.iter().zip(y.iter()) {
        let f = basis(*xi);
        for r in 0..3 {
            b[r] += f[r] * yi;
            for c in 0..3 {
                a[r][c] += f[r] * f[c];
            }
        }
    }
    let coef = solve3(a, b).unwrap_or([y.iter().sum::<f64>() / n, 0.0, 0.0]);
    for (yi, xi) in y.iter_mut().zip(x) {
        let f = basis(*xi);
        *yi -= coef[0] * f[0] + coef[1] * f[1] + coef[2] * f[2];
    }
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut out = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * out[c]).sum();
        out[r] = (b[r] - s) / a[r][r];
    }
    Some(out)
}

/// Number of strict interior local maxima.
pub fn count_local_maxima(y: &[f64]) -> usize {
    y.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}

/// Measured SOW next to the large-`n` prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SowComparison {
    pub kappa: f64,
    pub tau: f64,
    pub variant: SweepVariant,
    pub measured: f64,
    pub error: f64,
    pub predicted: f64,
    pub rel_dev: f64,
    pub within_error: bool,
}

/// `π/τ` for the symmetric sweep, `π/(2τ)` with the second laser fixed.
pub fn sow_limit(tau: f64, variant: SweepVariant) -> f64 {
    match variant {
        SweepVariant::SymmetricLTau => PI / tau,
        SweepVariant::FixedSecondLaser => PI / (2.0 * tau),
    }
}

pub fn compare_sow(e: &SowEstimate, kappa: f64, tau: f64, variant: SweepVariant) -> SowComparison {
    let predicted = sow_limit(tau, variant);
    SowComparison {
        kappa,
        tau,
        variant,
        measured: e.value,
        error: e.fwhm_error,
        predicted,
        rel_dev: (e.value - predicted) / predicted,
        within_error: (e.value - predicted).abs() <= e.fwhm_error,
    }
}

pub const REPORT_HEADER: &str = "kappa,tau,variant,sow,sow_err,sow_predicted,rel_dev,within_error";

impl SowComparison {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.kappa,
            self.tau,
            self.variant,
            self.measured,
            self.error,
            self.predicted,
            self.rel_dev,
            self.within_error
        )
    }
}

/// Weighted least-squares line through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// Standard error from the supplied uncertainties.
    pub stderr: f64,
    pub points: usize,
}

/// Fits `y = s·x` with weights `1/σ²`; points with non-positive or non-finite
/// `σ` are skipped.
pub fn fit_slope_through_origin(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<SlopeFit, AnalysisError> {
    let (mut sxx, mut sxy, mut n) = (0.0, 0.0, 0);
    for ((&a, &b), &s) in x.iter().zip(y).zip(sigma) {
        if !(s > 0.0 && s.is_finite() && a.is_finite() && b.is_finite()) {
            continue;
        }
        let w = 1.0 / (s * s);
        sxx += w * a * a;
        sxy += w * a * b;
        n += 1;
    }
    if n == 0 || sxx == 0.0 {
        return Err(AnalysisError::DegenerateFit);
    }
    Ok(SlopeFit { slope: sxy / sxx, stderr: sxx.sqrt().recip(), points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(period: f64, lo: f64, hi: f64, n: usize) -> SweepProfile {
        let d: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let y: Vec<f64> = d.iter().map(|x| 1.0 + 0.1 * (2.0 * PI * x / period).cos()).collect();
        SweepProfile::new(d, y.clone(), y, 0.5, 1.0, SweepVariant::SymmetricLTau)
    }

    #[test]
    fn constant_profile_normalises_to_one() {
        let p = SweepProfile::new(vec![-3.0, -1.0, 0.0, 2.0, 4.0], vec![2.5; 5], vec![0.4; 5], 1.0, 1.0, SweepVariant::SymmetricLTau);
        let n = normalize_profile(&p).unwrap();
        assert!(n.i1_norm.unwrap().iter().all(|v| *v == 1.0));
        assert!(n.i2_norm.unwrap().iter().all(|v| *v == 1.0));
        assert_eq!(dome_edge(&normalize_profile(&p).unwrap()), 0.0);
    }

    #[test]
    fn normalisation_needs_range() {
        let p = SweepProfile::new(vec![0.0, 1.0], vec![1.0; 2], vec![1.0; 2], 1.0, 1.0, SweepVariant::SymmetricLTau);
        assert!(matches!(normalize_profile(&p), Err(AnalysisError::InsufficientRange { .. })));
    }

    #[test]
    fn single_tone_period() {
        let period = 2.7;
        let p = synthetic(period, 0.0, 80.0, 1601);
        let e = extract_sow(&p).unwrap();
        let bin = period * period / 80.0;
        assert!((e.value - period).abs() < bin, "{e:?}");
        assert!(e.fwhm_error > 0.0 && e.fwhm_error < 0.5 * period);
    }

    #[test]
    fn flat_or_linear_profile_has_no_peak() {
        let d: Vec<f64> = (0..400).map(|i| i as f64 * 0.1).collect();
        for slope in [0.0, 1e-3] {
            let y: Vec<f64> = d.iter().map(|x| 1.0 + slope * x).collect();
            let p = SweepProfile::new(d.clone(), y.clone(), y, 0.0, 1.0, SweepVariant::SymmetricLTau);
            assert!(matches!(extract_sow(&p), Err(AnalysisError::NoPeak { .. })), "{slope}");
        }
    }

    #[test]
    fn too_few_sidebands() {
        let p = synthetic(10.0, 0.0, 60.0, 601);
        assert!(matches!(extract_sow(&p), Err(AnalysisError::TooFewSidebands { .. })));
    }

    #[test]
    fn comparison_and_fit() {
        let e = SowEstimate { value: 3.2, fwhm_error: 0.2, n_sidebands_used: 20, dome_edge: 1.0, peak_ratio: 10.0 };
        let c = compare_sow(&e, 1.0, 1.0, SweepVariant::SymmetricLTau);
        assert!(c.within_error);
        assert_eq!(compare_sow(&e, 1.0, 2.0, SweepVariant::SymmetricLTau).predicted, PI / 2.0);
        assert_eq!(compare_sow(&e, 1.0, 1.0, SweepVariant::FixedSecondLaser).predicted, PI / 2.0);
        let x = [0.5, 1.0, 1.5];
        let y: Vec<f64> = x.iter().map(|v| PI * v).collect();
        let f = fit_slope_through_origin(&x, &y, &[0.1; 3]).unwrap();
        assert!((f.slope - PI).abs() < 1e-14);
        assert!((f.stderr - 0.1 / (0.25f64 + 1.0 + 2.25).sqrt()).abs() < 1e-15);
    }
}
