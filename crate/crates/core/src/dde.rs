//! Fixed-step RK4 for systems with one discrete delay.
//!
//! The solution is kept on a uniform grid `t_k = k·h` together with the
//! derivative at every grid point. Delayed states at the intermediate RK
//! stages are read back with cubic Hermite interpolation on that grid, so `h`
//! does not need to divide `τ`.

use std::io::{self, Write};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdeError {
    #[error("non-finite state at t = {t} ns")]
    NonFinite { t: f64 },
    #[error("step h = {h} ns exceeds tau/4 = {limit} ns")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("invalid integration setup: {0}")]
    Invalid(String),
    #[error("delayed query at t = {t} ns falls outside the stored history")]
    HistoryUnderflow { t: f64 },
}

/// A right-hand side `x'(t) = f(t, x(t), x(t - τ))`.
pub trait DelaySystem {
    fn dim(&self) -> usize;

    fn delay(&self) -> f64;

    /// Writes `f(t, state, delayed)` into `out`. When `delay() == 0` the
    /// integrator passes the current stage state as `delayed`.
    fn rhs(&self, t: f64, state: &[f64], delayed: &[f64], out: &mut [f64]);
}

/// Initial function on `[-τ, 0]`.
pub trait History {
    fn value(&self, t: f64, out: &mut [f64]);

    /// Time derivative; defaults to a fourth-order central difference.
    fn derivative(&self, t: f64, step: f64, out: &mut [f64]) {
        let n = out.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        self.value(t - 2.0 * step, &mut a);
        self.value(t - step, &mut b);
        self.value(t + step, &mut c);
        self.value(t + 2.0 * step, &mut d);
        for i in 0..n {
            out[i] = (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * step);
        }
    }
}

/// Constant initial function.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantHistory(pub Vec<f64>);

impl History for ConstantHistory {
    fn value(&self, _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.0);
    }

    fn derivative(&self, _t: f64, _step: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Initial function given as a closure.
pub struct FnHistory<F>(pub F);

impl<F: Fn(f64, &mut [f64])> History for FnHistory<F> {
    fn value(&self, t: f64, out: &mut [f64]) {
        (self.0)(t, out)
    }
}

/// Uniformly sampled initial function with stored derivatives, evaluated by
/// cubic Hermite interpolation. Sample `k` sits at `t_start + k·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledHistory {
    pub t_start: f64,
    pub h: f64,
    pub dim: usize,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl SampledHistory {
    pub fn len(&self) -> usize {
        self.values.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + (self.len().saturating_sub(1)) as f64 * self.h
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self.derivatives.iter_mut().for_each(|v| *v *= factor);
        self
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.len();
        if n < 2 {
            return (0, 0.0);
        }
        let x = ((t - self.t_start) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        (i, x - i as f64)
    }
}

impl History for SampledHistory {
    fn value(&self, t: f64, out: &mut [f64]) {
        let d = self.dim;
        let (i, theta) = self.locate(t);
        if self.len() < 2 {
            out.copy_from_slice(&self.values[..d]);
            return;
        }
        hermite(
            &self.values[i * d..(i + 1) * d],
            &self.derivatives[i * d..(i + 1) * d],
            &self.values[(i + 1) * d..(i + 2) * d],
            &self.derivatives[(i + 1) * d..(i + 2) * d],
            self.h,
            theta,
            out,
        );
    }

    fn derivative(&self, t: f64, _step: f64, out: &mut [f64]) {
        let d = self.dim;
        if self.len() < 2 {
            out.copy_from_slice(&self.derivatives[..d]);
            return;
        }
        let (i, th) = self.locate(t);
        let (y0, m0) = (&self.values[i * d..(i + 1) * d], &self.derivatives[i * d..(i + 1) * d]);
        let (y1, m1) = (
            &self.values[(i + 1) * d..(i + 2) * d],
            &self.derivatives[(i + 1) * d..(i + 2) * d],
        );
        let h = self.h;
        let d00 = 6.0 * th * th - 6.0 * th;
        let d10 = 3.0 * th * th - 4.0 * th + 1.0;
        let d11 = 3.0 * th * th - 2.0 * th;
        for k in 0..d {
            out[k] = (d00 * (y0[k] - y1[k])) / h + d10 * m0[k] + d11 * m1[k];
        }
    }
}

#[inline]
fn hermite(y0: &[f64], m0: &[f64], y1: &[f64], m1: &[f64], h: f64, th: f64, out: &mut [f64]) {
    let th2 = th * th;
    let th3 = th2 * th;
    let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
    let h10 = (th3 - 2.0 * th2 + th) * h;
    let h01 = -2.0 * th3 + 3.0 * th2;
    let h11 = (th3 - th2) * h;
    for k in 0..out.len() {
        out[k] = h00 * y0[k] + h10 * m0[k] + h01 * y1[k] + h11 * m1[k];
    }
}

/// Grid samples `(state, derivative)` covering at least `[t - τ - h, t]`.
///
/// Stored as a ring indexed by the integer step number.
#[derive(Debug, Clone)]
pub struct HistorySegment {
    dim: usize,
    capacity: usize,
    first: i64,
    last: i64,
    data: Vec<f64>,
    /// Left derivative at `t = 0`, used when interpolating on `[-h, 0]`.
    origin_left_derivative: Vec<f64>,
}

impl HistorySegment {
    fn new(dim: usize, capacity: usize) -> Self {
        Self {
            dim,
            capacity,
            first: 0,
            last: -1,
            data: vec![0.0; capacity * 2 * dim],
            origin_left_derivative: vec![0.0; dim],
        }
    }

    fn slot(&self, k: i64) -> usize {
        (k.rem_euclid(self.capacity as i64) as usize) * 2 * self.dim
    }

    fn push(&mut self, k: i64, state: &[f64], derivative: &[f64]) {
        let s = self.slot(k);
        let d = self.dim;
        self.data[s..s + d].copy_from_slice(state);
        self.data[s + d..s + 2 * d].copy_from_slice(derivative);
        if self.last < self.first {
            self.first = k;
        }
        self.last = k;
        if self.last - self.first + 1 > self.capacity as i64 {
            self.first = self.last - self.capacity as i64 + 1;
        }
    }

    fn set_derivative(&mut self, k: i64, derivative: &[f64]) {
        let s = self.slot(k);
        let d = self.dim;
        self.data[s + d..s + 2 * d].copy_from_slice(derivative);
    }

    fn state(&self, k: i64) -> &[f64] {
        let s = self.slot(k);
        &self.data[s..s + self.dim]
    }

    fn derivative(&self, k: i64) -> &[f64] {
        let s = self.slot(k);
        &self.data[s + self.dim..s + 2 * self.dim]
    }

    /// Interpolates at fractional grid position `x` (time `x·h`).
    fn interpolate(&self, x: f64, h: f64, out: &mut [f64]) -> Result<(), DdeError> {
        let i = x.floor();
        let theta = x - i;
        let i = i as i64;
        if i < self.first || (theta > 0.0 && i + 1 > self.last) || i > self.last {
            return Err(DdeError::HistoryUnderflow { t: x * h });
        }
        if theta == 0.0 {
            out.copy_from_slice(self.state(i));
            return Ok(());
        }
        let m1 = if i + 1 == 0 {
            &self.origin_left_derivative[..]
        } else {
            self.derivative(i + 1)
        };
        hermite(
            self.state(i),
            self.derivative(i),
            self.state(i + 1),
            m1,
            h,
            theta,
            out,
        );
        Ok(())
    }

    /// Copies the samples with `t ≥ t_from` into a standalone history whose
    /// time axis is shifted by `shift`.
    fn export(&self, h: f64, t_from: f64, shift: f64) -> SampledHistory {
        let k0 = ((t_from / h).floor() as i64).max(self.first);
        let d = self.dim;
        let mut values = Vec::with_capacity(((self.last - k0 + 1).max(0) as usize) * d);
        let mut derivatives = Vec::with_capacity(values.capacity());
        for k in k0..=self.last {
            values.extend_from_slice(self.state(k));
            derivatives.extend_from_slice(self.derivative(k));
        }
        SampledHistory {
            t_start: k0 as f64 * h + shift,
            h,
            dim: d,
            values,
            derivatives,
        }
    }
}

/// RK4 stepper that owns its history.
pub struct Integrator<'a, S: DelaySystem + ?Sized> {
    sys: &'a S,
    h: f64,
    tau: f64,
    lag_steps: f64,
    step: i64,
    state: Vec<f64>,
    segment: HistorySegment,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    delayed: Vec<f64>,
    derivative_ready: bool,
}

impl<'a, S: DelaySystem + ?Sized> Integrator<'a, S> {
    /// Samples `history` on the grid over `[-τ, 0]` and prepares the first
    /// step. Requires `h ≤ τ/4` whenever `τ > 0`.
    pub fn new(sys: &'a S, history: &dyn History, h: f64) -> Result<Self, DdeError> {
        Self::with_memory(sys, history, h, 0.0)
    }

    /// Like [`Integrator::new`], but keeps at least `memory` ns of past
    /// samples available to [`Integrator::export_history`].
    pub fn with_memory(
        sys: &'a S,
        history: &dyn History,
        h: f64,
        memory: f64,
    ) -> Result<Self, DdeError> {
        let dim = sys.dim();
        let tau = sys.delay();
        if dim == 0 {
            return Err(DdeError::Invalid("state dimension must be at least 1".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(DdeError::Invalid(format!("step must be positive, got {h}")));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(DdeError::Invalid(format!("delay must be >= 0, got {tau}")));
        }
        if tau > 0.0 && h > tau / 4.0 {
            return Err(DdeError::StepTooLarge { h, limit: tau / 4.0 });
        }
        let lag_steps = tau / h;
        let back = lag_steps.ceil() as i64 + 1;
        let capacity = back.max((memory.max(0.0) / h).ceil() as i64 + 1) as usize + 8;
        let mut segment = HistorySegment::new(dim, capacity);
        let mut y = vec![0.0; dim];
        let mut dy = vec![0.0; dim];
        if tau > 0.0 {
            for k in -back..=0 {
                let t = (k as f64 * h).max(-tau);
                history.value(t, &mut y);
                history.derivative(t, h, &mut dy);
                segment.push(k, &y, &dy);
            }
            segment.origin_left_derivative.copy_from_slice(&dy);
        } else {
            history.value(0.0, &mut y);
            segment.push(0, &y, &dy);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(DdeError::NonFinite { t: 0.0 });
        }
        Ok(Self {
            sys,
            h,
            tau,
            lag_steps,
            step: 0,
            state: y,
            segment,
            k: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            tmp: vec![0.0; dim],
            delayed: vec![0.0; dim],
            derivative_ready: false,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.h
    }

    pub fn step_index(&self) -> i64 {
        self.step
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    fn delayed_at(&mut self, c: f64) -> Result<(), DdeError> {
        let x = self.step as f64 - self.lag_steps + c;
        self.segment.interpolate(x, self.h, &mut self.delayed)
    }

    /// Advances one step of length `h`.
    pub fn step(&mut self) -> Result<(), DdeError> {
        let h = self.h;
        let t = self.time();
        let n = self.state.len();
        let delayed_system = self.tau > 0.0;

        // k1 doubles as the stored derivative at the current grid point.
        if !self.derivative_ready {
            if delayed_system {
                self.delayed_at(0.0)?;
                self.sys.rhs(t, &self.state, &self.delayed, &mut self.k[0]);
            } else {
                self.sys.rhs(t, &self.state, &self.state, &mut self.k[0]);
            }
            self.segment.set_derivative(self.step, &self.k[0]);
        }
        self.derivative_ready = false;

        let stages = [(0.5, 1usize), (0.5, 2), (1.0, 3)];
        for &(c, s) in &stages {
            for i in 0..n {
                self.tmp[i] = self.state[i] + c * h * self.k[s - 1][i];
            }
            if delayed_system {
                if s != 2 {
                    self.delayed_at(c)?;
                }
                self.sys.rhs(t + c * h, &self.tmp, &self.delayed, &mut self.k[s]);
            } else {
                self.sys.rhs(t + c * h, &self.tmp, &self.tmp, &mut self.k[s]);
            }
        }
        for i in 0..n {
            self.state[i] += h / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
        self.step += 1;
        if self.state.iter().any(|v| !v.is_finite()) {
            return Err(DdeError::NonFinite { t: self.time() });
        }

        // Derivative at the new grid point; reused as k1 of the next step.
        let t_new = self.time();
        if delayed_system {
            self.delayed_at(0.0)?;
            self.sys.rhs(t_new, &self.state, &self.delayed, &mut self.k[0]);
        } else {
            self.sys.rhs(t_new, &self.state, &self.state, &mut self.k[0]);
        }
        self.segment.push(self.step, &self.state, &self.k[0]);
        self.derivative_ready = true;
        Ok(())
    }

    /// Steps until `t ≥ t_end`, calling `observe(t, state)` after every step.
    pub fn run_until<F>(&mut self, t_end: f64, mut observe: F) -> Result<(), DdeError>
    where
        F: FnMut(f64, &[f64]),
    {
        let last = (t_end / self.h - 1e-9).ceil() as i64;
        while self.step < last {
            self.step()?;
            observe(self.time(), &self.state);
        }
        Ok(())
    }

    /// The stored samples from `t_from` onwards, re-based so that the final
    /// sample sits at `t = 0`.
    pub fn export_history(&self, t_from: f64) -> SampledHistory {
        self.segment.export(self.h, t_from, -self.time())
    }
}

/// Which samples [`integrate`] keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Retention {
    /// Every sample from `t = 0`.
    Full,
    /// Only samples with `t ≥ t_end - duration`.
    Trailing(f64),
}

/// Uniformly spaced solution samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dim: usize,
    pub h: f64,
    /// Index of the first retained sample; its time is `first_step·h`.
    pub first_step: i64,
    pub states: Vec<f64>,
    /// `key=value` pairs echoed into dumps.
    pub metadata: Vec<(String, String)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        (self.first_step + i as i64) as f64 * self.h
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        (0..self.len()).map(move |i| (self.time(i), self.state(i)))
    }

    /// Writes `t,re_E1,im_E1,re_E2,im_E2,N1,N2`, truncated to the state
    /// dimension, followed by `# key=value` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        const COLUMNS: [&str; 6] = ["re_E1", "im_E1", "re_E2", "im_E2", "N1", "N2"];
        let mut header = String::from("t");
        for (i, c) in COLUMNS.iter().take(self.dim).enumerate() {
            let _ = i;
            header.push(',');
            header.push_str(c);
        }
        for i in COLUMNS.len()..self.dim {
            header.push_str(&format!(",x{i}"));
        }
        writeln!(w, "{header}")?;
        for (t, y) in self.iter() {
            write!(w, "{t:.6}")?;
            for v in y {
                write!(w, ",{v:.12e}")?;
            }
            writeln!(w)?;
        }
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// Integrates `sys` on `[0, t_end]` from `history` with step `h`.
pub fn integrate<S: DelaySystem + ?Sized>(
    sys: &S,
    history: &dyn History,
    h: f64,
    t_end: f64,
    retention: Retention,
) -> Result<Trajectory, DdeError> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(DdeError::Invalid(format!("t_end must be positive, got {t_end}")));
    }
    let mut integ = Integrator::new(sys, history, h)?;
    let dim = sys.dim();
    let t_keep = match retention {
        Retention::Full => 0.0,
        Retention::Trailing(d) => (t_end - d).max(0.0),
    };
    let first_step = ((t_keep / h) - 1e-9).ceil().max(0.0) as i64;
    let n_steps = (t_end / h - 1e-9).ceil() as i64;
    let mut states = Vec::with_capacity(((n_steps - first_step + 1).max(0) as usize) * dim);
    if first_step == 0 {
        states.extend_from_slice(integ.state());
    }
    let mut step = 0i64;
    integ.run_until(t_end, |_, y| {
        step += 1;
        if step >= first_step {
            states.extend_from_slice(y);
        }
    })?;
    Ok(Trajectory {
        dim,
        h,
        first_step,
        states,
        metadata: Vec::new(),
    })
}
