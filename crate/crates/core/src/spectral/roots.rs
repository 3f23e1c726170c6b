//! Root finding for the characteristic function inside a rectangular window.
//!
//! Seeds come from a coarse scan flagging cells where both the real and the
//! imaginary part change sign; each seed is polished with Newton's method.
//! The result is certified against the argument-principle winding number of
//! the window boundary, and the scan is refined until the two agree.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    char_derivative, char_residual, markovian_eigenvalues, Eigenvalue, SearchWindow,
    SpectralError, SpectralParams, SweepVariant,
};

const BOUNDARY_SAMPLES: usize = 256;
const MAX_REFINEMENTS: usize = 5;
const RESIDUAL_REL: f64 = 1e-9;

/// All roots inside `w`, sorted by decreasing real part.
///
/// Every returned root satisfies `|f(λ)| ≤ 1e-9·κ²` and the number of roots
/// equals the winding number of `f` along the boundary of `w`.
pub fn find_eigenvalues(
    p: &SpectralParams,
    w: &SearchWindow,
) -> Result<Vec<Eigenvalue>, SpectralError> {
    p.validate()?;
    w.validate(p.tau)?;
    let scale = p.rate_scale();
    let edge_tol = 1e-9 * scale;

    if p.kappa == 0.0 || p.tau == 0.0 {
        let (a, b) = if p.kappa == 0.0 {
            let r = Complex64::new(0.0, p.delta_omega);
            (r, -r)
        } else {
            markovian_eigenvalues(p.kappa, p.delta_omega)
        };
        let mut out = Vec::with_capacity(2);
        for z in [a, b] {
            check_boundary(w, z, edge_tol)?;
            if w.contains(z) {
                out.push(Eigenvalue::certified(z, p));
            }
        }
        sort_roots(&mut out);
        return Ok(out);
    }

    let winding = winding_number(p, w)?;
    let tol = RESIDUAL_REL * p.kappa * p.kappa;
    let dedup = 1e-6 * p.kappa.max(1.0 / p.tau);
    let mut spacing = w.seed_spacing.min(PI / (8.0 * p.tau));
    let mut roots: Vec<Complex64> = Vec::new();
    let mut flagged = 0;

    for _ in 0..=MAX_REFINEMENTS {
        let seeds = scan_seeds(p, w, spacing);
        flagged = seeds.len();
        for seed in seeds {
            if let Some(z) = newton(p, seed, scale) {
                accept(p, w, z, tol, dedup, edge_tol, &mut roots)?;
            }
        }
        if p.variant == SweepVariant::SymmetricLTau {
            for z in real_axis_roots(p, w, spacing / 4.0) {
                accept(p, w, z, tol, dedup, edge_tol, &mut roots)?;
            }
            let conj: Vec<Complex64> = roots.iter().map(|z| z.conj()).collect();
            for c in conj {
                if let Some(z) = newton(p, c, scale) {
                    accept(p, w, z, tol, dedup, edge_tol, &mut roots)?;
                }
            }
        }
        if roots.len() as i64 == winding {
            break;
        }
        spacing *= 0.5;
    }

    if roots.len() as i64 != winding {
        return Err(SpectralError::NonConvergence {
            count: flagged,
            found: roots.len(),
            winding,
        });
    }
    let mut out: Vec<Eigenvalue> = roots.into_iter().map(|z| Eigenvalue::certified(z, p)).collect();
    sort_roots(&mut out);
    Ok(out)
}

/// `U = max Re λ` over the roots in `w`.
pub fn dominant_rate(p: &SpectralParams, w: &SearchWindow) -> Result<f64, SpectralError> {
    find_eigenvalues(p, w)?
        .iter()
        .map(|e| e.u)
        .fold(None, |acc: Option<f64>, u| Some(acc.map_or(u, |a| a.max(u))))
        .ok_or(SpectralError::Empty)
}

/// Number of roots enclosed by the boundary of `w`, counted by tracking the
/// argument of `f` counter-clockwise around the rectangle.
pub fn winding_number(p: &SpectralParams, w: &SearchWindow) -> Result<i64, SpectralError> {
    let corners = [
        Complex64::new(w.u_min, w.v_min),
        Complex64::new(w.u_max, w.v_min),
        Complex64::new(w.u_max, w.v_max),
        Complex64::new(w.u_min, w.v_max),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let mut prev_z = a;
        let mut prev_f = guarded_eval(p, a)?;
        for i in 1..=BOUNDARY_SAMPLES {
            let z = a + (b - a) * (i as f64 / BOUNDARY_SAMPLES as f64);
            let fz = guarded_eval(p, z)?;
            total += arg_increment(p, prev_z, prev_f, z, fz, 0)?;
            prev_z = z;
            prev_f = fz;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn arg_increment(
    p: &SpectralParams,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    depth: u32,
) -> Result<f64, SpectralError> {
    let d = (fb / fa).arg();
    if d.abs() <= PI / 4.0 || depth >= 24 {
        return Ok(d);
    }
    let zm = 0.5 * (za + zb);
    let fm = guarded_eval(p, zm)?;
    Ok(arg_increment(p, za, fa, zm, fm, depth + 1)? + arg_increment(p, zm, fm, zb, fb, depth + 1)?)
}

fn guarded_eval(p: &SpectralParams, z: Complex64) -> Result<Complex64, SpectralError> {
    let f = char_residual(z, p);
    let magnitude =
        z.norm_sqr() + p.delta_omega * p.delta_omega + p.kappa * p.kappa * (-2.0 * p.tau * z.re).exp();
    if f.norm() <= 1e-10 * magnitude {
        return Err(SpectralError::RootOnBoundary { u: z.re, v: z.im });
    }
    Ok(f)
}

fn scan_seeds(p: &SpectralParams, w: &SearchWindow, spacing: f64) -> Vec<Complex64> {
    let nu = ((w.u_max - w.u_min) / spacing).ceil().max(1.0) as usize;
    let nv = ((w.v_max - w.v_min) / spacing).ceil().max(1.0) as usize;
    let du = (w.u_max - w.u_min) / nu as f64;
    let dv = (w.v_max - w.v_min) / nv as f64;
    let node = |i: usize, j: usize| Complex64::new(w.u_min + i as f64 * du, w.v_min + j as f64 * dv);

    let mut prev: Vec<Complex64> = (0..=nu).map(|i| char_residual(node(i, 0), p)).collect();
    let mut cur = vec![Complex64::new(0.0, 0.0); nu + 1];
    let mut seeds = Vec::new();
    for j in 1..=nv {
        for (i, c) in cur.iter_mut().enumerate() {
            *c = char_residual(node(i, j), p);
        }
        for i in 0..nu {
            let corners = [prev[i], prev[i + 1], cur[i], cur[i + 1]];
            if changes_sign(corners.iter().map(|c| c.re)) && changes_sign(corners.iter().map(|c| c.im)) {
                seeds.push(Complex64::new(
                    w.u_min + (i as f64 + 0.5) * du,
                    w.v_min + (j as f64 - 0.5) * dv,
                ));
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    seeds
}

fn changes_sign(mut values: impl Iterator<Item = f64>) -> bool {
    let first = match values.next() {
        Some(v) => v,
        None => return false,
    };
    let (mut lo, mut hi) = (first, first);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    lo <= 0.0 && hi >= 0.0
}

/// Real roots of the symmetric characteristic function, bracketed on a 1D grid.
fn real_axis_roots(p: &SpectralParams, w: &SearchWindow, spacing: f64) -> Vec<Complex64> {
    if w.v_min > 0.0 || w.v_max < 0.0 {
        return Vec::new();
    }
    let f = |u: f64| char_residual(Complex64::new(u, 0.0), p).re;
    let n = ((w.u_max - w.u_min) / spacing).ceil().max(2.0) as usize;
    let du = (w.u_max - w.u_min) / n as f64;
    let mut out = Vec::new();
    let mut a = w.u_min;
    let mut fa = f(a);
    for i in 1..=n {
        let b = w.u_min + i as f64 * du;
        let fb = f(b);
        if fa == 0.0 {
            out.push(Complex64::new(a, 0.0));
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            if let Ok(r) = crate::special::bisect(f, a, b, 1e-15 * (a.abs() + b.abs()).max(1e-300)) {
                out.push(Complex64::new(r, 0.0));
            }
        }
        a = b;
        fa = fb;
    }
    out
}

fn newton(p: &SpectralParams, start: Complex64, scale: f64) -> Option<Complex64> {
    let mut z = start;
    let limit = 1e4 * scale.max(start.norm());
    let mut small_steps = 0;
    for _ in 0..100 {
        let f = char_residual(z, p);
        let df = char_derivative(z, p);
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > limit {
            return None;
        }
        if step.norm() <= 1e-14 * z.norm().max(scale) {
            small_steps += 1;
            if small_steps >= 2 {
                return Some(z);
            }
        }
    }
    None
}

fn accept(
    p: &SpectralParams,
    w: &SearchWindow,
    mut z: Complex64,
    tol: f64,
    dedup: f64,
    edge_tol: f64,
    roots: &mut Vec<Complex64>,
) -> Result<(), SpectralError> {
    if p.variant == SweepVariant::SymmetricLTau && z.im.abs() < dedup {
        z.im = 0.0;
    }
    check_boundary(w, z, edge_tol)?;
    if !w.contains(z) || char_residual(z, p).norm() > tol {
        return Ok(());
    }
    if roots.iter().all(|r| (r - z).norm() > dedup) {
        roots.push(z);
    }
    Ok(())
}

fn check_boundary(w: &SearchWindow, z: Complex64, edge_tol: f64) -> Result<(), SpectralError> {
    let inflated = SearchWindow {
        u_min: w.u_min - edge_tol,
        u_max: w.u_max + edge_tol,
        v_min: w.v_min - edge_tol,
        v_max: w.v_max + edge_tol,
        ..*w
    };
    if inflated.contains(z) && w.boundary_distance(z) <= edge_tol {
        return Err(SpectralError::RootOnBoundary { u: z.re, v: z.im });
    }
    Ok(())
}

fn sort_roots(roots: &mut [Eigenvalue]) {
    roots.sort_by(|a, b| b.u.total_cmp(&a.u).then(b.v.total_cmp(&a.v)));
}
