//! Adaptive Simpson quadrature for the detection integrals.

use crate::error::Result;

/// Relative tolerance the detection integrals request.
pub const QUAD_REL_TOL: f64 = 1e-8;
/// Absolute floor for integrals whose value is near zero.
pub const QUAD_ABS_TOL: f64 = 1e-12;

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &mut F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // Richardson: the refined pair is accurate to delta / 15
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    let half = 0.5 * eps;
    Ok(recurse(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?
        + recurse(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?)
}

/// Integrates `f` over [a, b] to the larger of the absolute tolerance and
/// the relative tolerance times a coarse estimate of the integral.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let nodes = 2 * INITIAL_PANELS;
    let step = (b - a) / nodes as f64;
    let mut xs = [0.0f64; 2 * INITIAL_PANELS + 1];
    let mut fs = [0.0f64; 2 * INITIAL_PANELS + 1];
    for (i, (x, v)) in xs.iter_mut().zip(fs.iter_mut()).enumerate() {
        *x = if i == nodes { b } else { a + step * i as f64 };
        *v = f(*x)?;
    }
    let mut rough = 0.0;
    for i in 0..INITIAL_PANELS {
        rough += simpson(fs[2 * i], fs[2 * i + 1], fs[2 * i + 2], xs[2 * i + 2] - xs[2 * i]);
    }
    let eps = (rel_tol * rough.abs()).max(abs_tol) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for i in 0..INITIAL_PANELS {
        let (x0, x1, x2) = (xs[2 * i], xs[2 * i + 1], xs[2 * i + 2]);
        let (f0, f1, f2) = (fs[2 * i], fs[2 * i + 1], fs[2 * i + 2]);
        let whole = simpson(f0, f1, f2, x2 - x0);
        total += recurse(&mut f, x0, x1, x2, f0, f1, f2, whole, eps, MAX_DEPTH)?;
    }
    Ok(total)
}
