//! Training sequences: Zadoff-Chu roots, a maximal-length PN baseline, and
//! the wrap-around index arithmetic both rely on.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Wrap-around indexing for a fixed period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModIndex {
    period: usize,
}

impl ModIndex {
    pub fn new(period: usize) -> Self {
        assert!(period > 0, "period must be positive");
        ModIndex { period }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Reduces an arbitrary signed index into [0, period).
    pub fn reduce(&self, index: i64) -> usize {
        index.rem_euclid(self.period as i64) as usize
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn check_root(n: usize, mu: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidLength(n));
    }
    if mu == 0 || mu >= n || gcd(mu as u64, n as u64) != 1 {
        return Err(Error::InvalidRoot { mu, n });
    }
    Ok(())
}

/// Zadoff-Chu sequence of odd length `N` with root `mu`.
///
/// Samples follow x(k) = exp(-i pi mu k (k+1) / N). Every sample has unit
/// magnitude, and for coprime `mu` the periodic autocorrelation vanishes at
/// every nonzero cyclic shift, which is what makes the family useful as a
/// timing reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcSequence {
    n: usize,
    mu: usize,
    samples: Vec<Complex64>,
}

impl ZcSequence {
    /// Generates the sequence for an odd length `n >= 3` and a root coprime
    /// with it.
    pub fn new(n: usize, mu: usize) -> Result<Self> {
        check_root(n, mu)?;
        let two_n = 2 * n as u128;
        let samples = (0..n)
            .map(|k| {
                // The phase exponent mu*k*(k+1) is reduced mod 2N in integer
                // arithmetic, so the float argument never grows past one turn.
                let e = (mu as u128 * k as u128 * (k as u128 + 1)) % two_n;
                Complex64::from_polar(1.0, -PI * e as f64 / n as f64)
            })
            .collect();
        Ok(ZcSequence { n, mu, samples })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.mu
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Sample at an arbitrary signed index; the sequence extends periodically
    /// in both directions because N is odd.
    pub fn at(&self, index: i64) -> Complex64 {
        self.samples[index.rem_euclid(self.n as i64) as usize]
    }
}

pub const DEFAULT_PN_DEGREE: u32 = 25;
pub const DEFAULT_PN_TAPS: &[u32] = &[25, 3];

/// Maximal-length shift-register sequence mapped onto +/-1 symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct PnSequence {
    degree: u32,
    taps: Vec<u32>,
    symbols: Vec<Complex64>,
}

impl PnSequence {
    /// Runs a Fibonacci LFSR seeded with all ones and maps bit 0 to +1 and
    /// bit 1 to -1.
    ///
    /// Tap positions are the exponents of the feedback polynomial, the degree
    /// itself included, e.g. `{4, 1}` for x^4 + x + 1. Up to degree 16 the
    /// register is cycled once to confirm the taps give the full period;
    /// larger registers are taken on trust.
    pub fn new(degree: u32, taps: &[u32], length: usize) -> Result<Self> {
        if degree == 0 || degree > 63 {
            return Err(Error::DegenerateTaps);
        }
        if taps.is_empty()
            || taps.iter().any(|&t| t == 0 || t > degree)
            || !taps.contains(&degree)
        {
            return Err(Error::DegenerateTaps);
        }
        let period = (1u64 << degree) - 1;
        if length as u64 > period {
            return Err(Error::LengthExceedsPeriod {
                requested: length,
                period,
            });
        }
        if degree <= 16 && cycle_length(degree, taps) != period {
            return Err(Error::NonMaximalTaps { degree });
        }

        let seed = (1u64 << degree) - 1;
        let mut state = seed;
        let symbols = (0..length)
            .map(|_| {
                let bit = state & 1;
                state = step_lfsr(state, degree, taps);
                if bit == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            })
            .collect();
        let mut taps = taps.to_vec();
        taps.sort_unstable();
        taps.dedup();
        Ok(PnSequence {
            degree,
            taps,
            symbols,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }
}

// Tap t feeds from bit (degree - t), so the degree tap reads the output bit
// itself. Requiring the degree in the tap set keeps the step map invertible.
fn step_lfsr(state: u64, degree: u32, taps: &[u32]) -> u64 {
    let feedback = taps
        .iter()
        .fold(0u64, |acc, &t| acc ^ (state >> (degree - t)) & 1);
    (state >> 1) | (feedback << (degree - 1))
}

/// Steps the register until the all-ones state recurs.
fn cycle_length(degree: u32, taps: &[u32]) -> u64 {
    let seed = (1u64 << degree) - 1;
    let limit = 1u64 << degree;
    let mut state = seed;
    for count in 1..=limit {
        state = step_lfsr(state, degree, taps);
        if state == seed {
            return count;
        }
    }
    0
}

/// Cyclically shifted copy: out[i] = input[(i + shift) mod len].
pub fn cyclic_shift(input: &[Complex64], shift: i64) -> Vec<Complex64> {
    if input.is_empty() {
        return Vec::new();
    }
    let n = input.len() as i64;
    (0..n)
        .map(|i| input[(i + shift).rem_euclid(n) as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPSILON: f64 = 1e-12;

    #[test]
    fn zc_samples_have_unit_magnitude() {
        let seq = ZcSequence::new(839, 140).unwrap();
        for (k, s) in seq.samples().iter().enumerate() {
            assert!(
                (s.norm() - 1.0).abs() < EPSILON,
                "sample {} has magnitude {}",
                k,
                s.norm()
            );
        }
    }

    #[test]
    fn zc_length_three_root_one() {
        let seq = ZcSequence::new(3, 1).unwrap();
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
            Complex64::new(1.0, 0.0),
        ];
        for (s, e) in seq.samples().iter().zip(expected.iter()) {
            assert!((s - e).norm() < EPSILON, "got {s}, expected {e}");
        }
    }

    #[test]
    fn zc_first_sample_is_one() {
        for mu in [1, 29, 140, 367, 838] {
            let seq = ZcSequence::new(839, mu).unwrap();
            assert!((seq.samples()[0] - Complex64::new(1.0, 0.0)).norm() < EPSILON);
        }
    }

    #[test]
    fn zc_rejects_bad_parameters() {
        assert_eq!(ZcSequence::new(838, 5).unwrap_err(), Error::InvalidLength(838));
        assert_eq!(ZcSequence::new(1, 1).unwrap_err(), Error::InvalidLength(1));
        assert_eq!(
            ZcSequence::new(9, 3).unwrap_err(),
            Error::InvalidRoot { mu: 3, n: 9 }
        );
        assert_eq!(
            ZcSequence::new(839, 0).unwrap_err(),
            Error::InvalidRoot { mu: 0, n: 839 }
        );
        assert_eq!(
            ZcSequence::new(839, 839).unwrap_err(),
            Error::InvalidRoot { mu: 839, n: 839 }
        );
    }

    #[test]
    fn zc_conjugate_root_mirrors_sequence() {
        let a = ZcSequence::new(839, 140).unwrap();
        let b = ZcSequence::new(839, 839 - 140).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples().iter()) {
            assert!((x.conj() - y).norm() < EPSILON);
        }
    }

    #[test]
    fn zc_extends_periodically() {
        let seq = ZcSequence::new(11, 3).unwrap();
        for i in -25i64..25 {
            assert_eq!(seq.at(i), seq.at(i + 11));
        }
    }

    #[test]
    fn cyclic_shift_wraps_both_directions() {
        let seq = ZcSequence::new(5, 2).unwrap();
        let left = cyclic_shift(seq.samples(), -1);
        assert_eq!(left[0], seq.samples()[4]);
        assert_eq!(left[1], seq.samples()[0]);
        let right = cyclic_shift(seq.samples(), 7);
        assert_eq!(right[0], seq.samples()[2]);
    }

    #[test]
    fn cyclic_shift_round_trips() {
        let seq = ZcSequence::new(17, 5).unwrap();
        for k in [-40i64, -3, 0, 5, 17, 100] {
            let back = cyclic_shift(&cyclic_shift(seq.samples(), k), -k);
            assert_eq!(back, seq.samples());
        }
    }

    #[test]
    fn pn_degree_four_is_balanced() {
        let pn = PnSequence::new(4, &[4, 1], 15).unwrap();
        let minus: usize = pn.symbols().iter().filter(|s| s.re < 0.0).count();
        let plus: usize = pn.symbols().iter().filter(|s| s.re > 0.0).count();
        assert_eq!(minus, 8);
        assert_eq!(plus, 7);
    }

    #[test]
    fn pn_symbols_are_plus_minus_one() {
        let pn = PnSequence::new(DEFAULT_PN_DEGREE, DEFAULT_PN_TAPS, 839).unwrap();
        assert_eq!(pn.len(), 839);
        for s in pn.symbols() {
            assert!(s.im == 0.0 && (s.re == 1.0 || s.re == -1.0));
        }
    }

    #[test]
    fn pn_rejects_degenerate_and_overlong_requests() {
        assert_eq!(PnSequence::new(4, &[], 10).unwrap_err(), Error::DegenerateTaps);
        assert_eq!(
            PnSequence::new(4, &[5, 1], 10).unwrap_err(),
            Error::DegenerateTaps
        );
        // the feedback polynomial must actually reach the stated degree
        assert_eq!(
            PnSequence::new(4, &[3, 1], 10).unwrap_err(),
            Error::DegenerateTaps
        );
        assert_eq!(
            PnSequence::new(4, &[4, 1], 16).unwrap_err(),
            Error::LengthExceedsPeriod {
                requested: 16,
                period: 15
            }
        );
    }

    #[test]
    fn pn_rejects_non_maximal_taps() {
        // x^4 + x^2 + 1 factors, so the cycle closes early
        assert_eq!(
            PnSequence::new(4, &[4, 2], 15).unwrap_err(),
            Error::NonMaximalTaps { degree: 4 }
        );
    }

    #[test]
    fn register_cycle_lengths() {
        assert_eq!(cycle_length(4, &[4, 1]), 15);
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 closes after 6 states
        assert_eq!(cycle_length(4, &[4, 2]), 6);
        // x^16 + x^14 + x^13 + x^11 + 1 is a known primitive polynomial
        assert_eq!(cycle_length(16, &[16, 14, 13, 11]), 65535);
    }

    #[test]
    fn mod_index_reduces_into_period() {
        let m = ModIndex::new(7);
        assert_eq!(m.reduce(0), 0);
        assert_eq!(m.reduce(-1), 6);
        assert_eq!(m.reduce(15), 1);
        assert_eq!(m.period(), 7);
    }
}
