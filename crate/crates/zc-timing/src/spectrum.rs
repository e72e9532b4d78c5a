//! Where a frequency offset relocates the correlation peaks: critical
//! offsets of the window's shift hypotheses and the spectrum of their
//! occupation rates over a uniformly distributed true delay.

use std::collections::BTreeMap;

use crate::correlation::dirichlet_mag_sq;
use crate::error::{Error, Result};
use crate::sequence::check_root;

/// Detection window of `w` delay hypotheses over a period-`n` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisWindow {
    n: usize,
    w: usize,
}

impl HypothesisWindow {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::EmptyWindow);
        }
        if w > n {
            return Err(Error::WindowTooLarge { w, n });
        }
        Ok(HypothesisWindow { n, w })
    }

    pub fn period(&self) -> usize {
        self.n
    }

    pub fn hypotheses(&self) -> usize {
        self.w
    }

    /// Shift offsets reachable from true delay `kappa`: every hypothesis
    /// kappa' in the window corresponds to the offset kappa' - kappa.
    pub fn shift_offsets(&self, kappa: usize) -> Result<ShiftOffsetSet> {
        if kappa >= self.w {
            return Err(Error::KappaOutsideWindow { kappa, w: self.w });
        }
        Ok(ShiftOffsetSet {
            lo: -(kappa as i64),
            hi: (self.w - 1 - kappa) as i64,
        })
    }

    /// True delays whose windows contain the shift offset `delta_kappa`.
    pub fn kappas_reaching(&self, delta_kappa: i64) -> impl Iterator<Item = usize> {
        let w = self.w as i64;
        let lo = (-delta_kappa).max(0);
        let hi = (w - 1 - delta_kappa).min(w - 1);
        (lo..=hi).filter_map(|k| usize::try_from(k).ok())
    }

    /// Number of true delays whose windows contain `delta_kappa`,
    /// `w - |delta_kappa|` clipped at zero.
    pub fn count_reaching(&self, delta_kappa: i64) -> usize {
        (self.w as i64 - delta_kappa.abs()).max(0) as usize
    }
}

/// Contiguous range of shift offsets, inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftOffsetSet {
    lo: i64,
    hi: i64,
}

impl ShiftOffsetSet {
    pub fn contains(&self, delta_kappa: i64) -> bool {
        self.lo <= delta_kappa && delta_kappa <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Frequency offset at which the shift-`delta_kappa` correlation peak
/// becomes perfect: the representative of mu * delta_kappa modulo `n`
/// closest to zero. Lies in (-n/2, n/2) because `n` is odd.
pub fn critical_offset(n: usize, mu: usize, delta_kappa: i64) -> Result<i64> {
    check_root(n, mu)?;
    if delta_kappa == 0 {
        return Err(Error::ZeroShift);
    }
    let r = (mu as i128 * delta_kappa as i128).rem_euclid(n as i128);
    let centered = if 2 * r > n as i128 { r - n as i128 } else { r };
    Ok(centered as i64)
}

/// Histogram of critical offsets over the window, true delay uniform.
///
/// Counts are kept as integers so the rational masses `count / w` survive
/// exactly; every nonzero shift offset of every delay contributes weight
/// `1 / w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingSpectrum {
    n: usize,
    mu: usize,
    w: usize,
    bins: BTreeMap<i64, u64>,
}

impl TimingSpectrum {
    pub fn period(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.mu
    }

    pub fn hypotheses(&self) -> usize {
        self.w
    }

    pub fn count(&self, key: i64) -> u64 {
        self.bins.get(&key).copied().unwrap_or(0)
    }

    pub fn magnitude(&self, key: i64) -> f64 {
        self.count(key) as f64 / self.w as f64
    }

    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        self.bins.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.bins.iter().map(|(&k, &c)| (k, c as f64 / self.w as f64))
    }

    /// Smallest |key| carrying mass; how close the nearest spurious peak
    /// sits to the true one in offset units.
    pub fn min_abs_key(&self) -> Option<i64> {
        self.bins.keys().map(|k| k.abs()).min()
    }

    /// Total mass at offsets with |key| strictly below `bound`.
    pub fn mass_below(&self, bound: f64) -> f64 {
        self.bins
            .iter()
            .filter(|(&k, _)| (k.abs() as f64) < bound)
            .map(|(_, &c)| c as f64 / self.w as f64)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        let total: u64 = self.bins.values().sum();
        total as f64 / self.w as f64
    }
}

pub fn timing_spectrum(n: usize, mu: usize, w: usize) -> Result<TimingSpectrum> {
    check_root(n, mu)?;
    let window = HypothesisWindow::new(n, w)?;
    let mut bins = BTreeMap::new();
    for kappa in 0..w {
        for dk in window.shift_offsets(kappa)?.iter() {
            if dk == 0 {
                continue;
            }
            *bins.entry(critical_offset(n, mu, dk)?).or_insert(0u64) += 1;
        }
    }
    Ok(TimingSpectrum { n, mu, w, bins })
}

/// High-SNR detection regime relative to the half-offset tie point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorRegime {
    /// |offset| strictly between one half and one: the unit-offset
    /// competitor dominates the true peak outright.
    AboveHalf,
    /// |offset| exactly one half: competitor and true peak tie, noise
    /// splits the decisions evenly.
    AtHalf,
}

/// Residual error probability as SNR grows without bound.
pub fn error_floor(n: usize, mu: usize, w: usize, regime: FloorRegime) -> Result<f64> {
    let spectrum = timing_spectrum(n, mu, w)?;
    let mass = spectrum.magnitude(1);
    Ok(match regime {
        FloorRegime::AboveHalf => mass,
        FloorRegime::AtHalf => mass / 2.0,
    })
}

/// Ratio of the mean decision metric at shift offset `delta_kappa` to the
/// mean at the true delay, for frequency offset `delta_lambda` and SNR
/// `eta`. `eta` may be infinite, giving the noise-free ratio of squared
/// correlation magnitudes.
pub fn relative_mean_metric(
    n: usize,
    mu: usize,
    delta_kappa: i64,
    delta_lambda: f64,
    eta: f64,
) -> Result<f64> {
    check_root(n, mu)?;
    if !delta_lambda.is_finite() {
        return Err(Error::InvalidFrequencyOffset(delta_lambda));
    }
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::InvalidSnr { eta });
    }
    let inv_eta = if eta.is_infinite() { 0.0 } else { 1.0 / eta };
    let num = n as f64 * dirichlet_mag_sq(n, mu as i128 * delta_kappa as i128, delta_lambda)
        + inv_eta;
    let den = n as f64 * dirichlet_mag_sq(n, 0, delta_lambda) + inv_eta;
    if den == 0.0 {
        if num == 0.0 {
            return Err(Error::DivisionUndefined);
        }
        return Ok(f64::INFINITY);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn critical_offsets_root_140() {
        let expected = [
            140, 280, -419, -279, -139, 1, 141, 281, -418, -278, -138, 2, 142, 282, -417,
        ];
        for (i, &e) in expected.iter().enumerate() {
            let dk = i as i64 + 1;
            assert_eq!(critical_offset(839, 140, dk).unwrap(), e, "dk={dk}");
            assert_eq!(critical_offset(839, 140, -dk).unwrap(), -e, "dk={}", -dk);
        }
    }

    #[test]
    fn critical_offsets_root_367() {
        let expected = [
            367, -105, 262, -210, 157, -315, 52, 419, -53, 314, -158, 209, -263, 104, -368,
        ];
        for (i, &e) in expected.iter().enumerate() {
            let dk = i as i64 + 1;
            assert_eq!(critical_offset(839, 367, dk).unwrap(), e, "dk={dk}");
            assert_eq!(critical_offset(839, 367, -dk).unwrap(), -e, "dk={}", -dk);
        }
    }

    #[test]
    fn critical_offset_validates_input() {
        assert_eq!(critical_offset(839, 140, 0).unwrap_err(), Error::ZeroShift);
        assert_eq!(
            critical_offset(838, 140, 1).unwrap_err(),
            Error::InvalidLength(838)
        );
        assert_eq!(
            critical_offset(9, 3, 1).unwrap_err(),
            Error::InvalidRoot { mu: 3, n: 9 }
        );
    }

    #[test]
    fn conjugate_root_mirrors_offsets() {
        for dk in 1..=15i64 {
            let a = critical_offset(839, 140, dk).unwrap();
            let b = critical_offset(839, 839 - 140, dk).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn shift_offset_sets_cover_window() {
        let win = HypothesisWindow::new(839, 16).unwrap();
        let set = win.shift_offsets(0).unwrap();
        assert_eq!((set.lo, set.hi), (0, 15));
        let set = win.shift_offsets(15).unwrap();
        assert_eq!((set.lo, set.hi), (-15, 0));
        let set = win.shift_offsets(9).unwrap();
        assert!(set.contains(6));
        assert_eq!(set.len(), 16);
        let set = win.shift_offsets(10).unwrap();
        assert!(!set.contains(6));
        assert_eq!(
            win.shift_offsets(16).unwrap_err(),
            Error::KappaOutsideWindow { kappa: 16, w: 16 }
        );
    }

    #[test]
    fn kappas_reaching_counts() {
        let win = HypothesisWindow::new(839, 16).unwrap();
        assert_eq!(win.kappas_reaching(6).collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
        assert_eq!(win.kappas_reaching(-6).collect::<Vec<_>>(), (6..16).collect::<Vec<_>>());
        assert_eq!(win.kappas_reaching(0).count(), 16);
        assert_eq!(win.kappas_reaching(16).count(), 0);
        assert_eq!(win.count_reaching(6), 10);
        assert_eq!(win.count_reaching(-6), 10);
        assert_eq!(win.count_reaching(20), 0);
    }

    #[test]
    fn spectrum_root_140_window_16() {
        let s = timing_spectrum(839, 140, 16).unwrap();
        assert_eq!(s.magnitude(1), 0.625);
        assert_eq!(s.magnitude(-1), 0.625);
        assert_eq!(s.count(1), 10);
        assert_eq!(s.magnitude(2), 4.0 / 16.0);
        assert_eq!(s.magnitude(140), 15.0 / 16.0);
        assert_eq!(s.magnitude(0), 0.0);
        assert_eq!(s.min_abs_key(), Some(1));
        assert_eq!(s.total_mass(), 15.0);
    }

    #[test]
    fn spectrum_root_367_windows() {
        let s20 = timing_spectrum(839, 367, 20).unwrap();
        assert_eq!(s20.magnitude(1), 0.2);
        assert_eq!(s20.magnitude(-1), 0.2);
        assert_eq!(s20.count(1), 4);
        assert_eq!(s20.min_abs_key(), Some(1));

        let s16 = timing_spectrum(839, 367, 16).unwrap();
        assert_eq!(s16.magnitude(1), 0.0);
        assert_eq!(s16.min_abs_key(), Some(52));
    }

    #[test]
    fn spectrum_root_29_avoids_small_offsets() {
        let s = timing_spectrum(839, 29, 20).unwrap();
        assert_eq!(s.min_abs_key(), Some(29));
        assert_eq!(s.mass_below(29.0), 0.0);
        assert!(s.mass_below(30.0) > 0.0);
    }

    #[test]
    fn spectrum_is_symmetric() {
        for &(mu, w) in &[(140usize, 16usize), (367, 20), (29, 20), (1, 32)] {
            let s = timing_spectrum(839, mu, w).unwrap();
            for key in s.keys() {
                assert_eq!(s.count(key), s.count(-key), "mu={mu} w={w} key={key}");
            }
        }
    }

    #[test]
    fn spectrum_counts_follow_window_overlap() {
        let win = HypothesisWindow::new(839, 20).unwrap();
        let s = timing_spectrum(839, 367, 20).unwrap();
        for dk in 1..20i64 {
            let key = critical_offset(839, 367, dk).unwrap();
            assert_eq!(s.count(key), win.count_reaching(dk) as u64);
        }
    }

    #[test]
    fn error_floors_match_unit_offset_mass() {
        assert_eq!(error_floor(839, 140, 16, FloorRegime::AboveHalf).unwrap(), 0.625);
        assert_eq!(error_floor(839, 140, 16, FloorRegime::AtHalf).unwrap(), 0.3125);
        assert_eq!(error_floor(839, 367, 20, FloorRegime::AboveHalf).unwrap(), 0.2);
        assert_eq!(error_floor(839, 367, 20, FloorRegime::AtHalf).unwrap(), 0.1);
        assert_eq!(error_floor(839, 29, 20, FloorRegime::AboveHalf).unwrap(), 0.0);
    }

    #[test]
    fn mean_metric_ratio_noise_free() {
        // mu dk = 840, one past the period: at offset 1/2 the relocated
        // peak ties the true one
        let tie = relative_mean_metric(839, 140, 6, 0.5, f64::INFINITY).unwrap();
        assert!((tie - 1.0).abs() < 1e-12);

        // without frequency offset the shifted peak vanishes
        assert_eq!(relative_mean_metric(839, 140, 6, 0.0, f64::INFINITY).unwrap(), 0.0);

        // past the tie point the relocated peak dominates
        let above = relative_mean_metric(839, 140, 6, 0.6, f64::INFINITY).unwrap();
        let expected = ((PI * 0.6 / 839.0).sin() / (PI * 0.4 / 839.0).sin()).powi(2);
        assert!((above - expected).abs() < 1e-10, "{above} vs {expected}");
        assert!(above > 1.0);
    }

    #[test]
    fn mean_metric_ratio_finite_snr_shrinks_toward_one() {
        let noise_free = relative_mean_metric(839, 140, 6, 0.6, f64::INFINITY).unwrap();
        let at_unit_snr = relative_mean_metric(839, 140, 6, 0.6, 1.0).unwrap();
        let near_zero_snr = relative_mean_metric(839, 140, 6, 0.6, 1e-300).unwrap();
        assert!(at_unit_snr > 1.0 && at_unit_snr < noise_free);
        assert!((near_zero_snr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_metric_ratio_degenerate_cases() {
        // integer offset kills the true peak while mu dk = 840 realigns the
        // shifted one perfectly
        assert_eq!(
            relative_mean_metric(839, 140, 6, 1.0, f64::INFINITY).unwrap(),
            f64::INFINITY
        );
        // both peaks vanish: no meaningful ratio
        assert_eq!(
            relative_mean_metric(839, 140, 1, 1.0, f64::INFINITY).unwrap_err(),
            Error::DivisionUndefined
        );
        assert_eq!(
            relative_mean_metric(839, 140, 6, 0.5, 0.0).unwrap_err(),
            Error::InvalidSnr { eta: 0.0 }
        );
        assert!(matches!(
            relative_mean_metric(839, 140, 6, f64::NAN, 1.0).unwrap_err(),
            Error::InvalidFrequencyOffset(_)
        ));
    }

    #[test]
    fn window_validation() {
        assert_eq!(HypothesisWindow::new(839, 0).unwrap_err(), Error::EmptyWindow);
        assert_eq!(
            HypothesisWindow::new(11, 12).unwrap_err(),
            Error::WindowTooLarge { w: 12, n: 11 }
        );
        assert!(HypothesisWindow::new(11, 11).is_ok());
    }
}
