//! Real-branch Lambert W and a bracketing scalar root finder.
//!
//! Only the two real branches `W₀` and `W₋₁` are provided. Both are computed
//! with Halley iteration on `g(w) = w - x·e^{-w}`, which never overflows for
//! finite `x`.

use std::f64::consts::E;

use thiserror::Error;

/// `-1/e`, the common branch point of `W₀` and `W₋₁`.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Below this distance from the branch point the three-term series is used
/// directly instead of iterating.
const SERIES_RADIUS_P: f64 = 1e-4;

/// Distance from `-1/e` inside which `-1` is returned without further work.
const BRANCH_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("lambert W branch {branch} is undefined at x = {x}")]
    Domain { branch: i8, x: f64 },
    #[error("interval [{lo}, {hi}] does not bracket a root (f = {f_lo}, {f_hi})")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("iteration did not converge")]
    NoConvergence,
}

/// Which real branch of the Lambert W function to evaluate.
///
/// Only `W₀` (principal, `w ≥ -1`) and `W₋₁` (`w ≤ -1`) are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WBranch {
    Principal,
    Lower,
}

impl WBranch {
    pub fn index(self) -> i8 {
        match self {
            WBranch::Principal => 0,
            WBranch::Lower => -1,
        }
    }

    /// Builds a branch from its integer index, rejecting anything but 0 and -1.
    pub fn from_index(index: i32) -> Option<Self> {
        match index {
            0 => Some(WBranch::Principal),
            -1 => Some(WBranch::Lower),
            _ => None,
        }
    }
}

/// Solves `w·e^w = x` on the requested real branch.
pub fn lambert_w(branch: WBranch, x: f64) -> Result<f64, SpecialError> {
    let domain = || SpecialError::Domain {
        branch: branch.index(),
        x,
    };
    if !x.is_finite() {
        return Err(domain());
    }
    if (x - BRANCH_POINT).abs() <= BRANCH_SNAP {
        return Ok(-1.0);
    }
    if x < BRANCH_POINT {
        return Err(domain());
    }
    if branch == WBranch::Lower && x >= 0.0 {
        return Err(domain());
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    // p = sqrt(2(e·x + 1)) parameterises the neighbourhood of the branch point.
    let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
    if p < SERIES_RADIUS_P {
        return Ok(branch_point_series(branch, p));
    }

    let guess = initial_guess(branch, x, p);
    let w = halley(x, guess)?;
    Ok(match branch {
        WBranch::Principal => w.max(-1.0),
        WBranch::Lower => w.min(-1.0),
    })
}

fn branch_point_series(branch: WBranch, p: f64) -> f64 {
    let p = match branch {
        WBranch::Principal => p,
        WBranch::Lower => -p,
    };
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p.powi(3) - 43.0 / 540.0 * p.powi(4)
}

fn initial_guess(branch: WBranch, x: f64, p: f64) -> f64 {
    match branch {
        WBranch::Principal => {
            if x < -0.25 {
                branch_point_series(branch, p)
            } else if x < 3.0 {
                x.ln_1p()
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        WBranch::Lower => {
            if x < -0.25 {
                branch_point_series(branch, p)
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    }
}

fn halley(x: f64, mut w: f64) -> Result<f64, SpecialError> {
    for _ in 0..64 {
        let xe = x * (-w).exp();
        let g = w - xe;
        let dg = 1.0 + xe;
        let ddg = -xe;
        let denom = 2.0 * dg * dg - g * ddg;
        if denom == 0.0 {
            return Ok(w);
        }
        let step = 2.0 * g * dg / denom;
        if !step.is_finite() {
            return Err(SpecialError::NoConvergence);
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1e-300) {
            return Ok(w);
        }
    }
    Ok(w)
}

/// Bisection on a bracketing interval `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` or the function hits an
/// exact zero.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, SpecialError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(SpecialError::NoBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
