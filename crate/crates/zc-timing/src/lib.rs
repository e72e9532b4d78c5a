//! Timing detection with Zadoff-Chu sequences under carrier frequency
//! offset: sequence generation, offset-dependent correlation, the induced
//! timing spectrum, analytical detection-error probabilities, and a
//! Monte Carlo detector to check the analysis against.

pub mod analytics;
pub mod correlation;
pub mod error;
pub mod exec;
pub mod quad;
pub mod select;
pub mod sequence;
pub mod simulate;
pub mod special;
pub mod spectrum;

pub use analytics::{
    timing_distribution, timing_distribution_seq, DetectionScenario, TimingDistribution,
};
pub use correlation::{
    autocorr_mag_sq, autocorr_offset, circular_correlate, dirichlet_mag_sq, sin_pi,
    CorrelatorOutput,
};
pub use quad::{adaptive_simpson, QUAD_ABS_TOL, QUAD_REL_TOL};
pub use special::{bessel_i0_scaled, marcum_q1, marcum_q1_complement, marcum_split};
pub use error::{Error, Result};
pub use select::{assess_root, coprime_roots, rank_roots, rank_roots_seq, RootReport};
pub use sequence::{
    cyclic_shift, gcd, ModIndex, PnSequence, ZcSequence, DEFAULT_PN_DEGREE, DEFAULT_PN_TAPS,
};
pub use simulate::{
    detect_timing, run_experiment, run_experiment_seq, synthesize_received, truncate_cp,
    EmpiricalDistribution, KappaMode, SimulationConfig,
};
pub use spectrum::{
    critical_offset, error_floor, relative_mean_metric, timing_spectrum, FloorRegime,
    HypothesisWindow, ShiftOffsetSet, TimingSpectrum,
};
