//! Ranking of candidate roots for a given length and hypothesis window.
//! A root is good when its timing spectrum keeps every component far from
//! zero frequency offset; the ranking is lexicographic: larger smallest
//! spectral key first, then less mass near zero, then the smaller root.

use crate::error::{Error, Result};
use crate::exec;
use crate::sequence::gcd;
use crate::spectrum::{timing_spectrum, TimingSpectrum};

/// Selection-relevant summary of one root's timing spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    mu: usize,
    spectrum: TimingSpectrum,
}

impl RootReport {
    pub fn root(&self) -> usize {
        self.mu
    }

    /// Smallest |key| in the spectrum; `None` when the window admits no
    /// nonzero shift at all.
    pub fn min_abs_critical_offset(&self) -> Option<i64> {
        self.spectrum.min_abs_key()
    }

    /// Spectrum magnitude at key 1, the false-peak mass once the frequency
    /// offset passes half a subcarrier. Zero unless some in-window shift
    /// has critical offset one.
    pub fn floor_above_half(&self) -> f64 {
        self.spectrum.magnitude(1)
    }

    /// Total spectrum magnitude at keys with |key| strictly below `bound`.
    pub fn mass_below(&self, bound: f64) -> f64 {
        self.spectrum.mass_below(bound)
    }

    pub fn spectrum(&self) -> &TimingSpectrum {
        &self.spectrum
    }
}

/// Builds the timing spectrum of one root and wraps it as a report.
pub fn assess_root(n: usize, mu: usize, w: usize) -> Result<RootReport> {
    Ok(RootReport {
        mu,
        spectrum: timing_spectrum(n, mu, w)?,
    })
}

/// All roots coprime to `n`, the full candidate set.
pub fn coprime_roots(n: usize) -> Vec<usize> {
    (1..n).filter(|&mu| gcd(mu as u64, n as u64) == 1).collect()
}

fn sort_reports(mut reports: Vec<(RootReport, f64)>) -> Vec<RootReport> {
    reports.sort_by(|(a, a_mass), (b, b_mass)| {
        let a_min = a.min_abs_critical_offset().unwrap_or(i64::MAX);
        let b_min = b.min_abs_critical_offset().unwrap_or(i64::MAX);
        b_min
            .cmp(&a_min)
            .then_with(|| a_mass.total_cmp(b_mass))
            .then_with(|| a.mu.cmp(&b.mu))
    });
    reports.into_iter().map(|(r, _)| r).collect()
}

fn check_ranking_inputs(candidates: &[usize], freq_bound: f64) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    if !freq_bound.is_finite() || freq_bound < 0.0 {
        return Err(Error::NegativeArgument {
            name: "freq_bound",
            value: freq_bound,
        });
    }
    // keys are integers, so "near the frequency uncertainty" means
    // |key| <= ceil(bound)
    Ok(freq_bound.ceil() + 1.0)
}

/// Ranks candidate roots: descending smallest spectral key, then ascending
/// spectrum mass within the frequency uncertainty `freq_bound`, then
/// ascending root. The order is total, so any input permutation ranks the
/// same.
pub fn rank_roots(
    n: usize,
    w: usize,
    candidates: &[usize],
    freq_bound: f64,
) -> Result<Vec<RootReport>> {
    let threshold = check_ranking_inputs(candidates, freq_bound)?;
    let assessed = exec::map(candidates.to_vec(), move |mu| {
        assess_root(n, mu, w).map(|r| {
            let mass = r.mass_below(threshold);
            (r, mass)
        })
    });
    Ok(sort_reports(assessed.into_iter().collect::<Result<_>>()?))
}

/// Sequential twin of [`rank_roots`].
pub fn rank_roots_seq(
    n: usize,
    w: usize,
    candidates: &[usize],
    freq_bound: f64,
) -> Result<Vec<RootReport>> {
    let threshold = check_ranking_inputs(candidates, freq_bound)?;
    let assessed = exec::map_seq(candidates.to_vec(), move |mu| {
        assess_root(n, mu, w).map(|r| {
            let mass = r.mass_below(threshold);
            (r, mass)
        })
    });
    Ok(sort_reports(assessed.into_iter().collect::<Result<_>>()?))
}
