//! Correlator bank and the offset-dependent autocorrelation of a
//! Zadoff-Chu sequence, both as a direct sum over samples and in the
//! closed Dirichlet-kernel form the analysis builds on.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// sin(pi x), exact at every integer.
///
/// Folding the argument into [-1/2, 1/2] before multiplying by pi keeps the
/// zeros exact; evaluating `(PI * x).sin()` directly leaves residues around
/// 1e-16 at odd integers, enough to break the removable-singularity test in
/// [`dirichlet_mag_sq`].
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// Squared magnitude of the periodic Dirichlet ratio
/// sin(pi (dl - m)) / (n sin(pi (dl - m) / n)) for integer `m`.
///
/// The ratio has a removable singularity wherever dl - m is a multiple of
/// `n`; there the limit is 1. Everything downstream consumes the square, so
/// the sign of the numerator is dropped.
pub fn dirichlet_mag_sq(n: usize, m: i128, dl: f64) -> f64 {
    let m_red = m.rem_euclid(2 * n as i128) as f64;
    let den = n as f64 * sin_pi((dl - m_red) / n as f64);
    if den == 0.0 {
        return 1.0;
    }
    let num = sin_pi(dl);
    (num / den) * (num / den)
}

/// Closed form for the squared autocorrelation magnitude of the root-`mu`
/// sequence at cyclic shift `delta_kappa` and fractional frequency offset
/// `delta_lambda`: the Dirichlet ratio evaluated at dl - mu * delta_kappa.
pub fn autocorr_mag_sq(n: usize, mu: usize, delta_kappa: i64, delta_lambda: f64) -> f64 {
    dirichlet_mag_sq(n, mu as i128 * delta_kappa as i128, delta_lambda)
}

/// Offset autocorrelation computed directly from the samples:
/// (1/N) sum_n s[(n + delta_kappa) mod N] conj(s[n]) e^{+i 2 pi delta_lambda n / N}.
///
/// Works for any periodic reference, not only Zadoff-Chu, which is what the
/// closed form above is cross-checked against.
pub fn autocorr_offset(samples: &[Complex64], delta_kappa: i64, delta_lambda: f64) -> Complex64 {
    let n = samples.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let step = 2.0 * PI * delta_lambda / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, s) in samples.iter().enumerate() {
        let shifted = samples[(k as i64 + delta_kappa).rem_euclid(n as i64) as usize];
        acc += shifted * s.conj() * Complex64::from_polar(1.0, step * k as f64);
    }
    acc / n as f64
}

/// One branch of the correlator bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorOutput {
    /// Hypothesised delay this branch tests.
    pub hypothesis: usize,
    /// Normalised correlator sum.
    pub value: Complex64,
    /// Decision metric, |value|^2.
    pub metric: f64,
}

impl CorrelatorOutput {
    fn new(hypothesis: usize, value: Complex64) -> Self {
        CorrelatorOutput {
            hypothesis,
            value,
            metric: value.norm_sqr(),
        }
    }
}

/// Correlates a length-N window against the reference at every hypothesised
/// delay in `0..hypotheses`, treating the window as one period of a cyclic
/// signal.
pub fn circular_correlate(
    window: &[Complex64],
    reference: &[Complex64],
    hypotheses: usize,
) -> Result<Vec<CorrelatorOutput>> {
    let n = reference.len();
    if window.len() != n {
        return Err(Error::LengthMismatch {
            left: window.len(),
            right: n,
        });
    }
    if hypotheses == 0 {
        return Err(Error::EmptyWindow);
    }
    if hypotheses > n {
        return Err(Error::WindowTooLarge {
            w: hypotheses,
            n,
        });
    }
    Ok((0..hypotheses)
        .map(|kappa| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, r) in reference.iter().enumerate() {
                acc += window[(k + kappa) % n] * r.conj();
            }
            CorrelatorOutput::new(kappa, acc / n as f64)
        })
        .collect())
}
