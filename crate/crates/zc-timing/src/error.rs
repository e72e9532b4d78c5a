use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence length must be odd and at least 3, got {0}")]
    InvalidLength(usize),

    #[error("root {mu} must lie in [1, {n}) and be coprime with {n}")]
    InvalidRoot { mu: usize, n: usize },

    #[error("requested {requested} symbols but the register cycles after {period}")]
    LengthExceedsPeriod { requested: usize, period: u64 },

    #[error("feedback taps are empty or fall outside the register")]
    DegenerateTaps,

    #[error("taps do not generate a maximal-length cycle for degree {degree}")]
    NonMaximalTaps { degree: u32 },

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("critical offset is undefined for a zero shift offset")]
    ZeroShift,

    #[error("window must contain at least one hypothesis")]
    EmptyWindow,

    #[error("window of {w} hypotheses does not fit a period of {n}")]
    WindowTooLarge { w: usize, n: usize },

    #[error("delay {kappa} lies outside the hypothesis window of {w}")]
    KappaOutsideWindow { kappa: usize, w: usize },

    #[error("shift offset {delta_kappa} is unreachable from delay {kappa}")]
    OffsetOutsideSet { delta_kappa: i64, kappa: usize },

    #[error("snr must be positive and finite, got {eta}")]
    InvalidSnr { eta: f64 },

    #[error("frequency offset must be finite, got {0}")]
    InvalidFrequencyOffset(f64),

    #[error("{name} must be nonnegative, got {value}")]
    NegativeArgument { name: &'static str, value: f64 },

    #[error("limit ratio is undefined: numerator and denominator both vanish")]
    DivisionUndefined,

    #[error("cyclic prefix of {n_cp} cannot absorb delay {kappa}")]
    KappaExceedsPrefix { kappa: usize, n_cp: usize },

    #[error("cyclic prefix of {n_cp} is shorter than the window needs ({min})")]
    PrefixTooShort { n_cp: usize, min: usize },

    #[error("simulation needs at least one trial")]
    NoTrials,

    #[error("candidate list is empty")]
    NoCandidates,

    #[error("threshold must be nonnegative and finite, got {0}")]
    InvalidThreshold(f64),

    #[error("numerical evaluation produced a non-finite value in {0}")]
    NonFinite(&'static str),
}
