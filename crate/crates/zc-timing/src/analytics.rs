//! Analytical detection probabilities. The correlator metric at each shift
//! hypothesis is noncentral chi-square with two degrees of freedom; the
//! detector picks the largest metric, so the probability of landing on a
//! given shift offset is an integral of that shift's metric density against
//! the product of the competitors' distribution functions.

use crate::correlation::dirichlet_mag_sq;
use crate::error::{Error, Result};
use crate::exec;
use crate::quad::{adaptive_simpson, QUAD_ABS_TOL, QUAD_REL_TOL};
use crate::sequence::check_root;
use crate::special::{bessel_i0_scaled, marcum_q1, marcum_q1_complement};
use crate::spectrum::HypothesisWindow;

/// Everything the analysis needs about one detection setup: sequence
/// parameters, window size, fractional frequency offset and linear SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionScenario {
    window: HypothesisWindow,
    mu: usize,
    delta_lambda: f64,
    eta: f64,
}

impl DetectionScenario {
    pub fn new(n: usize, mu: usize, w: usize, delta_lambda: f64, eta: f64) -> Result<Self> {
        check_root(n, mu)?;
        let window = HypothesisWindow::new(n, w)?;
        if !delta_lambda.is_finite() {
            return Err(Error::InvalidFrequencyOffset(delta_lambda));
        }
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::InvalidSnr { eta });
        }
        Ok(DetectionScenario {
            window,
            mu,
            delta_lambda,
            eta,
        })
    }

    /// Same as [`DetectionScenario::new`] with the SNR given in decibels.
    pub fn from_snr_db(n: usize, mu: usize, w: usize, delta_lambda: f64, eta_db: f64) -> Result<Self> {
        Self::new(n, mu, w, delta_lambda, 10f64.powf(eta_db / 10.0))
    }

    pub fn period(&self) -> usize {
        self.window.period()
    }

    pub fn root(&self) -> usize {
        self.mu
    }

    pub fn hypotheses(&self) -> usize {
        self.window.hypotheses()
    }

    pub fn window(&self) -> HypothesisWindow {
        self.window
    }

    pub fn frequency_offset(&self) -> f64 {
        self.delta_lambda
    }

    pub fn snr(&self) -> f64 {
        self.eta
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.eta.log10()
    }

    /// Correlation peak magnitude the detector sees at a shift offset.
    pub fn peak_magnitude(&self, delta_kappa: i64) -> f64 {
        dirichlet_mag_sq(
            self.period(),
            self.mu as i128 * delta_kappa as i128,
            self.delta_lambda,
        )
        .sqrt()
    }

    // Noncentral amplitude of the metric's underlying complex gaussian.
    fn rice_amplitude(&self, delta_kappa: i64) -> f64 {
        self.eta.sqrt() * self.peak_magnitude(delta_kappa)
    }

    // First Marcum argument for this shift's metric distribution.
    fn marcum_shape(&self, delta_kappa: i64) -> f64 {
        (2.0 * self.period() as f64 * self.eta).sqrt() * self.peak_magnitude(delta_kappa)
    }

    pub fn metric_mean(&self, delta_kappa: i64) -> f64 {
        let g = self.peak_magnitude(delta_kappa);
        g * g * self.eta + 1.0 / self.period() as f64
    }

    pub fn metric_var(&self, delta_kappa: i64) -> f64 {
        let nf = self.period() as f64;
        let g = self.peak_magnitude(delta_kappa);
        2.0 / nf * g * g * self.eta + 1.0 / (nf * nf)
    }

    /// Density of the decision metric at shift offset `delta_kappa`.
    pub fn metric_pdf(&self, delta_kappa: i64, zeta: f64) -> Result<f64> {
        if zeta.is_nan() || zeta < 0.0 {
            return Err(Error::NegativeArgument {
                name: "zeta",
                value: zeta,
            });
        }
        let nf = self.period() as f64;
        let a = self.rice_amplitude(delta_kappa);
        let s = zeta.sqrt();
        Ok(nf * (-nf * (s - a) * (s - a)).exp() * bessel_i0_scaled(2.0 * nf * a * s))
    }

    /// P(metric at `delta_kappa` exceeds `zeta`).
    pub fn metric_survival(&self, delta_kappa: i64, zeta: f64) -> Result<f64> {
        if zeta.is_nan() || zeta < 0.0 {
            return Err(Error::NegativeArgument {
                name: "zeta",
                value: zeta,
            });
        }
        marcum_q1(
            self.marcum_shape(delta_kappa),
            (2.0 * self.period() as f64 * zeta).sqrt(),
        )
    }

    // Upper integration limit: twelve deviations past the largest possible
    // metric mean, with a floor so near-zero SNR still covers the noise
    // tail to well under the quadrature tolerance.
    fn zeta_max(&self) -> f64 {
        let nf = self.period() as f64;
        let var_cap = 2.0 * self.eta / nf + 1.0 / (nf * nf);
        (self.eta + 1.0 / nf + 12.0 * var_cap.sqrt()).max(40.0 / nf)
    }

    /// Probability that detection lands on shift offset `delta_kappa_star`
    /// when the true delay is `kappa`: the chance this hypothesis's metric
    /// tops every other branch in the window.
    pub fn prob_shift_given_kappa(&self, delta_kappa_star: i64, kappa: usize) -> Result<f64> {
        let offsets = self.window.shift_offsets(kappa)?;
        if !offsets.contains(delta_kappa_star) {
            return Err(Error::OffsetOutsideSet {
                delta_kappa: delta_kappa_star,
                kappa,
            });
        }
        let shapes: Vec<f64> = offsets
            .iter()
            .filter(|&dk| dk != delta_kappa_star)
            .map(|dk| self.marcum_shape(dk))
            .collect();
        let nf = self.period() as f64;
        let a_star = self.rice_amplitude(delta_kappa_star);

        let integrand = |zeta: f64| -> Result<f64> {
            let s = zeta.sqrt();
            let pdf = nf * (-nf * (s - a_star) * (s - a_star)).exp()
                * bessel_i0_scaled(2.0 * nf * a_star * s);
            if pdf == 0.0 {
                return Ok(0.0);
            }
            let b = (2.0 * nf * zeta).sqrt();
            let mut product = pdf;
            for &shape in &shapes {
                let below = marcum_q1_complement(shape, b)?;
                if below == 0.0 {
                    return Ok(0.0);
                }
                product *= below;
            }
            Ok(product)
        };

        let value = adaptive_simpson(integrand, 0.0, self.zeta_max(), QUAD_ABS_TOL, QUAD_REL_TOL)?;
        if !value.is_finite() {
            return Err(Error::NonFinite("prob_shift_given_kappa"));
        }
        Ok(value)
    }

    /// Probability of landing on `delta_kappa_star` with the true delay
    /// uniform over the window. Offsets no delay can reach get zero.
    pub fn prob_shift_total(&self, delta_kappa_star: i64) -> Result<f64> {
        let mut acc = 0.0;
        for kappa in self.window.kappas_reaching(delta_kappa_star) {
            acc += self.prob_shift_given_kappa(delta_kappa_star, kappa)?;
        }
        Ok(acc / self.hypotheses() as f64)
    }

    /// Probability that detection misses the true delay.
    pub fn error_probability(&self) -> Result<f64> {
        Ok(1.0 - self.prob_shift_total(0)?)
    }
}

/// Analytical distribution of the detected shift offset over
/// [-(w-1), w-1].
#[derive(Debug, Clone, PartialEq)]
pub struct TimingDistribution {
    w: usize,
    probs: Vec<f64>,
}

impl TimingDistribution {
    pub fn hypotheses(&self) -> usize {
        self.w
    }

    pub fn prob(&self, delta_kappa: i64) -> f64 {
        let idx = delta_kappa + self.w as i64 - 1;
        if idx < 0 || idx >= self.probs.len() as i64 {
            return 0.0;
        }
        self.probs[idx as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let w = self.w as i64;
        self.probs.iter().enumerate().map(move |(i, &p)| (i as i64 - (w - 1), p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn error_mass(&self) -> f64 {
        self.total() - self.prob(0)
    }
}

fn offset_range(w: usize) -> Vec<i64> {
    let half = w as i64 - 1;
    (-half..=half).collect()
}

fn assemble(w: usize, results: Vec<Result<f64>>) -> Result<TimingDistribution> {
    let probs = results.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(TimingDistribution { w, probs })
}

/// Full analytical timing distribution, fanned out over shift offsets.
pub fn timing_distribution(scenario: &DetectionScenario) -> Result<TimingDistribution> {
    let s = *scenario;
    let results = exec::map(offset_range(s.hypotheses()), move |dk| s.prob_shift_total(dk));
    assemble(scenario.hypotheses(), results)
}

/// Sequential twin of [`timing_distribution`].
pub fn timing_distribution_seq(scenario: &DetectionScenario) -> Result<TimingDistribution> {
    let s = *scenario;
    let results = exec::map_seq(offset_range(s.hypotheses()), move |dk| s.prob_shift_total(dk));
    assemble(scenario.hypotheses(), results)
}
