use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficients are not Hermitian symmetric (relative asymmetry {asymmetry:.3e})")]
    NonHermitian { asymmetry: f64 },

    #[error("point z = {re} + {im}i lies outside the open unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigensolver(String),

    #[error("phase chain degenerate at n = {n}: |<f_(n+1) | S f_n>| = {overlap:.3e}")]
    PhaseDegenerate { n: usize, overlap: f64 },

    #[error("gap gamma_{n} = {gamma:.3e} is negative beyond tolerance")]
    GapViolation { n: usize, gamma: f64 },

    #[error("spectral parameter within {distance:.3e} of a pole")]
    NearPole { distance: f64 },

    #[error("normalizing constant is not positive at n = {n} (value {value:.3e})")]
    NonPositiveKappa { n: usize, value: f64 },

    #[error("vanishing denominator lambda_{p} - lambda_{n} - 1")]
    ZeroDenominator { n: usize, p: usize },

    #[error("root of Q at modulus {modulus:.12} is not outside the closed unit disc")]
    RootInsideDisc { modulus: f64 },

    #[error("tail action {tail:.3e} exceeds the finite-gap tolerance {tol:.3e}")]
    NotFiniteGap { tail: f64, tol: f64 },

    #[error("time step {dt} too large for {modes} modes (dt * N^2 = {value:.3} > {limit})")]
    StepTooLarge { dt: f64, modes: usize, value: f64, limit: f64 },

    #[error("blow-up detected at t = {t}: norm {norm:.3e}")]
    BlowupDetected { t: f64, norm: f64 },

    #[error("time grids do not match")]
    GridMismatch,

    #[error("quadrature not converged: {0}")]
    QuadratureNotConverged(String),

    #[error("no sign change of F on (0, {upper}]")]
    NoBracket { upper: f64 },

    #[error("truncation insufficient: q^N = {residual:.3e} at N = {modes}")]
    TruncationInsufficient { modes: usize, residual: f64 },

    #[error("integration interval too short")]
    IntervalTooShort,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable tag, used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonHermitian { .. } => "NonHermitian",
            Error::OutsideDisc { .. } => "OutsideDisc",
            Error::Eigensolver(_) => "Eigensolver",
            Error::PhaseDegenerate { .. } => "PhaseDegenerate",
            Error::GapViolation { .. } => "GapViolation",
            Error::NearPole { .. } => "NearPole",
            Error::NonPositiveKappa { .. } => "NonPositiveKappa",
            Error::ZeroDenominator { .. } => "ZeroDenominator",
            Error::RootInsideDisc { .. } => "RootInsideDisc",
            Error::NotFiniteGap { .. } => "NotFiniteGap",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::BlowupDetected { .. } => "BlowupDetected",
            Error::GridMismatch => "GridMismatch",
            Error::QuadratureNotConverged(_) => "QuadratureNotConverged",
            Error::NoBracket { .. } => "NoBracket",
            Error::TruncationInsufficient { .. } => "TruncationInsufficient",
            Error::IntervalTooShort => "IntervalTooShort",
            Error::Io(_) => "Io",
            Error::Format(_) => "Format",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
