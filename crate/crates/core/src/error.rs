use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid spectral density: {0}")]
    InvalidSpectralDensity(String),

    #[error("moment {name} is non-positive ({value:e}); the spectral density is invalid or too noisy")]
    NonPositiveMoment { name: &'static str, value: f64 },

    #[error("adaptive quadrature for {what} did not converge (error estimate {estimate:e}, tolerance {tolerance:e})")]
    QuadratureFail {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("frequency {omega:e} lies outside the open support of the spectral density")]
    OutsideSupport { omega: f64 },

    #[error("|W(omega)|^2 underflows at omega = {omega:e}; the spectral density vanishes inside its support")]
    DivisionNearZero { omega: f64 },

    #[error("zero-frequency limit of the bath correlation is undefined for {0}")]
    UndefinedZeroFrequencyLimit(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("spectrum is degenerate: gap {gap:e} between levels {index} and {next}; use the non-secular builder")]
    DegenerateSpectrum { gap: f64, index: usize, next: usize },

    #[error("unsupported coupling for this builder: {0}")]
    UnsupportedCoupling(String),

    #[error("generator has more than one stationary state")]
    DegenerateKernel,

    #[error("steady-state solve did not converge (relative residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("state has eigenvalue {eigenvalue:e} below the logarithm floor while the generator feeds that subspace")]
    SingularState { eigenvalue: f64 },

    #[error("oscillator truncation Nc = {nc} is too small: observables moved by {deviation:e} (relative) under Nc -> Nc + {step}")]
    TruncationTooSmall { nc: usize, step: usize, deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
