//! Seeded Monte Carlo of the receive chain: delayed sequence plus cyclic
//! prefix, frequency offset, white complex noise, prefix removal, the
//! circular correlator bank and an argmax decision. Each trial runs on its
//! own counter-derived RNG stream, so results are bit-identical however the
//! trials are scheduled.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::DetectionScenario;
use crate::correlation::circular_correlate;
use crate::error::{Error, Result};
use crate::exec;
use crate::sequence::ZcSequence;

/// How the true delay is chosen for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaMode {
    /// Drawn uniformly from the hypothesis window each trial.
    Uniform,
    /// Pinned to one delay for every trial.
    Fixed(usize),
}

/// One Monte Carlo setup: the detection scenario plus prefix length, trial
/// count, seed and delay policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    scenario: DetectionScenario,
    n_cp: usize,
    trials: u64,
    seed: u64,
    kappa_mode: KappaMode,
    noiseless: bool,
    random_phase: bool,
}

impl SimulationConfig {
    /// The prefix must cover every delay the window can produce, and a
    /// fixed delay must itself be a window hypothesis.
    pub fn new(
        scenario: DetectionScenario,
        n_cp: usize,
        trials: u64,
        seed: u64,
        kappa_mode: KappaMode,
    ) -> Result<Self> {
        let w = scenario.hypotheses();
        if n_cp + 1 < w {
            return Err(Error::PrefixTooShort { n_cp, min: w - 1 });
        }
        if let KappaMode::Fixed(kappa) = kappa_mode {
            if kappa >= w {
                return Err(Error::KappaOutsideWindow { kappa, w });
            }
        }
        if trials == 0 {
            return Err(Error::NoTrials);
        }
        Ok(SimulationConfig {
            scenario,
            n_cp,
            trials,
            seed,
            kappa_mode,
            noiseless: false,
            random_phase: false,
        })
    }

    /// Drops the noise term, leaving the clean delayed-and-rotated signal.
    pub fn noiseless(mut self, on: bool) -> Self {
        self.noiseless = on;
        self
    }

    /// Gives the channel tap a fresh uniform phase each trial. The decision
    /// metric is phase-invariant, so this only exercises the invariance.
    pub fn random_phase(mut self, on: bool) -> Self {
        self.random_phase = on;
        self
    }

    pub fn scenario(&self) -> DetectionScenario {
        self.scenario
    }

    pub fn cp_length(&self) -> usize {
        self.n_cp
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kappa_mode(&self) -> KappaMode {
        self.kappa_mode
    }

    pub fn is_noiseless(&self) -> bool {
        self.noiseless
    }

    pub fn uses_random_phase(&self) -> bool {
        self.random_phase
    }
}

// One unit-variance circular complex gaussian draw via Box-Muller; the
// 1 - u argument keeps the log away from zero.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let theta = 2.0 * PI * u2;
    Complex64::from_polar(r * FRAC_1_SQRT_2, theta)
}

/// One received frame of length `N_CP + N`: the cyclically extended
/// sequence delayed by `kappa`, rotated by the fractional frequency offset
/// and scaled to the configured SNR, plus unit-variance noise.
pub fn synthesize_received(
    seq: &ZcSequence,
    kappa: usize,
    config: &SimulationConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>> {
    if kappa > config.n_cp {
        return Err(Error::KappaExceedsPrefix {
            kappa,
            n_cp: config.n_cp,
        });
    }
    let n = seq.len();
    let n_cp = config.n_cp;
    let scenario = config.scenario;
    let step = 2.0 * PI * scenario.frequency_offset() / n as f64;
    let amp = scenario.snr().sqrt();
    let tap = if config.random_phase {
        Complex64::from_polar(amp, 2.0 * PI * rng.random::<f64>())
    } else {
        Complex64::new(amp, 0.0)
    };
    let mut y = Vec::with_capacity(n_cp + n);
    for i in 0..n_cp + n {
        let x = seq.at(i as i64 - n_cp as i64 - kappa as i64);
        let mut sample = tap * x * Complex64::from_polar(1.0, step * i as f64);
        if !config.noiseless {
            sample += complex_gaussian(rng);
        }
        y.push(sample);
    }
    Ok(y)
}

/// Drops the first `N_CP` samples, leaving the length-`N` window the
/// correlator sees.
pub fn truncate_cp(y: &[Complex64], config: &SimulationConfig) -> Result<Vec<Complex64>> {
    let n = config.scenario.period();
    if y.len() != config.n_cp + n {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: config.n_cp + n,
        });
    }
    Ok(y[config.n_cp..].to_vec())
}

/// Argmax of the correlator metrics over the window hypotheses, ties going
/// to the smallest delay.
pub fn detect_timing(y_prime: &[Complex64], seq: &ZcSequence, hypotheses: usize) -> Result<usize> {
    let bank = circular_correlate(y_prime, seq.samples(), hypotheses)?;
    let mut best = 0;
    let mut best_metric = bank[0].metric;
    for branch in &bank[1..] {
        if branch.metric > best_metric {
            best = branch.hypothesis;
            best_metric = branch.metric;
        }
    }
    Ok(best)
}

/// Histogram of detected shift offsets over a simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    w: usize,
    counts: Vec<u64>,
    trials: u64,
}

impl EmpiricalDistribution {
    fn assemble(w: usize, trials: u64, shifts: impl IntoIterator<Item = i64>) -> Self {
        let mut counts = vec![0u64; 2 * w - 1];
        for dk in shifts {
            counts[(dk + w as i64 - 1) as usize] += 1;
        }
        EmpiricalDistribution { w, counts, trials }
    }

    pub fn hypotheses(&self) -> usize {
        self.w
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// Trials that landed on the given shift offset.
    pub fn count(&self, delta_kappa: i64) -> u64 {
        let idx = delta_kappa + self.w as i64 - 1;
        if (0..self.counts.len() as i64).contains(&idx) {
            self.counts[idx as usize]
        } else {
            0
        }
    }

    pub fn frequency(&self, delta_kappa: i64) -> f64 {
        self.count(delta_kappa) as f64 / self.trials as f64
    }

    /// All shift offsets the window can produce, with their counts.
    pub fn entries(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let base = 1 - self.w as i64;
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (base + i as i64, c))
    }

    /// Fraction of trials that missed the true delay.
    pub fn error_rate(&self) -> f64 {
        1.0 - self.frequency(0)
    }

    /// Binomial standard error of the error rate.
    pub fn error_stderr(&self) -> f64 {
        let p = self.error_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

fn run_trial(seq: &ZcSequence, config: &SimulationConfig, trial: u64) -> Result<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let w = config.scenario.hypotheses();
    let kappa = match config.kappa_mode {
        KappaMode::Uniform => rng.random_range(0..w),
        KappaMode::Fixed(kappa) => kappa,
    };
    let y = synthesize_received(seq, kappa, config, &mut rng)?;
    let y_prime = truncate_cp(&y, config)?;
    let detected = detect_timing(&y_prime, seq, w)?;
    Ok(detected as i64 - kappa as i64)
}

fn assemble_run(config: &SimulationConfig, shifts: Vec<Result<i64>>) -> Result<EmpiricalDistribution> {
    let shifts: Vec<i64> = shifts.into_iter().collect::<Result<_>>()?;
    Ok(EmpiricalDistribution::assemble(
        config.scenario.hypotheses(),
        config.trials,
        shifts,
    ))
}

/// Runs every trial of the configured experiment and histograms the
/// detected shift offsets.
pub fn run_experiment(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    let seq = ZcSequence::new(config.scenario.period(), config.scenario.root())?;
    let cfg = *config;
    let shifts = exec::map((0..config.trials).collect(), move |t| {
        run_trial(&seq, &cfg, t)
    });
    assemble_run(config, shifts)
}

/// Sequential twin of [`run_experiment`]; same trials, same streams, same
/// histogram.
pub fn run_experiment_seq(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    let seq = ZcSequence::new(config.scenario.period(), config.scenario.root())?;
    let cfg = *config;
    let shifts = exec::map_seq((0..config.trials).collect(), move |t| {
        run_trial(&seq, &cfg, t)
    });
    assemble_run(config, shifts)
}
