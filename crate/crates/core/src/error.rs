use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("superposition needs at least one component")]
    EmptySuperposition,
    #[error("ladder level {0} listed more than once")]
    DuplicateLevel(i64),
    #[error("component weights must be finite, non-negative and not all zero")]
    InvalidWeights,
    #[error("quasimomentum {0} outside [0, 1)")]
    BetaOutOfRange(f64),
    #[error("grid of {grid} points is too small for a band of {band} levels (need at least {needed})")]
    GridTooSmall { grid: usize, band: usize, needed: usize },
    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),
    #[error("aliasing detected: guard-band mass {0:e} exceeds tolerance")]
    Aliasing(f64),
    #[error("profile has no peak above 1.05x its minimum")]
    NoPeak,
    #[error("initial momentum variance is zero; dispersion is undefined")]
    UndefinedDispersion,
    #[error("missing level {missing} must lie strictly inside ({lo}, {hi})")]
    MissingAtEndpoint { lo: i64, hi: i64, missing: i64 },
    #[error("state count {0} outside the supported range 2..=9")]
    CountOutOfRange(usize),
    #[error("Bragg pulse couples non-adjacent levels {0} and {1}")]
    NonAdjacentPair(i64, i64),
    #[error("pulse area {0} outside [0, 2pi]")]
    AreaOutOfRange(f64),
    #[error("target state cannot be built from |0> with outward adjacent pulses: {0}")]
    Unplannable(String),
    #[error("sin(gamma) vanishes; scaled momentum is undefined")]
    UndefinedScaling,
    #[error("scaled momentum needs an off-resonant schedule (epsilon != 0)")]
    OnResonance,
    #[error("scaled momentum needs an equal-weight two-level adjacent initial state")]
    NotTwoLevelRatchet,
    #[error("resolution not converged at z = {z}: doubling changed S by {delta:e}")]
    NeedsRefinement { z: f64, delta: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySuperposition => "empty_superposition",
            Error::DuplicateLevel(_) => "duplicate_level",
            Error::InvalidWeights => "invalid_weights",
            Error::BetaOutOfRange(_) => "beta_out_of_range",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::GridNotPowerOfTwo(_) => "grid_not_power_of_two",
            Error::Aliasing(_) => "aliasing",
            Error::NoPeak => "no_peak",
            Error::UndefinedDispersion => "undefined_dispersion",
            Error::MissingAtEndpoint { .. } => "missing_at_endpoint",
            Error::CountOutOfRange(_) => "count_out_of_range",
            Error::NonAdjacentPair(..) => "non_adjacent_pair",
            Error::AreaOutOfRange(_) => "area_out_of_range",
            Error::Unplannable(_) => "unplannable",
            Error::UndefinedScaling => "undefined_scaling",
            Error::OnResonance => "on_resonance",
            Error::NotTwoLevelRatchet => "not_two_level_ratchet",
            Error::NeedsRefinement { .. } => "needs_refinement",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnknownScenario(_) => "unknown_scenario",
            Error::InvalidSweep(_) => "invalid_sweep",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
