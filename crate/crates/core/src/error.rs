use thiserror::Error;

use crate::geometry::ComplexPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode of the library. The variant name is the stable
/// identifier the CLI prints verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("OutOfDomain: {0}")]
    OutOfDomain(String),
    #[error("DegenerateMap: determinant {det:e} below tolerance")]
    DegenerateMap { det: f64 },
    #[error("NotFixed: {0} is not a fixed point within tolerance")]
    NotFixed(ComplexPoint),
    #[error("Inconsistent: {0}")]
    Inconsistent(String),
    #[error("Unsupported: {0}")]
    Unsupported(String),
    #[error("LiftFailure: {0}")]
    LiftFailure(String),
    #[error("NonConvergence: {0}")]
    NonConvergence(String),
    #[error("Disconnected: {0}")]
    Disconnected(String),
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ValidationError: {0}")]
    Validation(String),
    #[error("EmptyRegion")]
    EmptyRegion,
    #[error("EmptyBall")]
    EmptyBall,
    #[error("NoCorridor: no dilation radius separates the components")]
    NoCorridor,
    #[error("LabelNotBounded: component {0} is not a bounded complement component")]
    LabelNotBounded(usize),
    #[error("OnBoundary: query point lies on the polygon")]
    OnBoundary,
    #[error("CoverScaleTooLarge: r_cover {r_cover} exceeds half the injectivity bound {bound}")]
    CoverScaleTooLarge { r_cover: f64, bound: f64 },
    #[error("MarginTooSmall: no interior cell has margin {0}")]
    MarginTooSmall(f64),
    #[error(
        "WrongConnectivity: expected a doubly-connected domain, found {0} complement components"
    )]
    WrongConnectivity(usize),
    #[error("SolverDivergence: {0}")]
    SolverDivergence(String),
    #[error("NonPositive: {0}")]
    NonPositive(String),
    #[error("NotMobiusRepresentable: {0}")]
    NotMobiusRepresentable(String),
    #[error("Precondition: {0}")]
    Precondition(String),
    #[error("TheoremViolation: {0}")]
    TheoremViolation(String),
}

impl Error {
    /// True for failures that mean a guaranteed mathematical property did not
    /// hold. These are bugs, never user errors.
    pub fn is_defect(&self) -> bool {
        matches!(
            self,
            Error::Inconsistent(_) | Error::NonConvergence(_) | Error::TheoremViolation(_)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::DegenerateMap { .. } => "DegenerateMap",
            Error::NotFixed(_) => "NotFixed",
            Error::Inconsistent(_) => "Inconsistent",
            Error::Unsupported(_) => "Unsupported",
            Error::LiftFailure(_) => "LiftFailure",
            Error::NonConvergence(_) => "NonConvergence",
            Error::Disconnected(_) => "Disconnected",
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::EmptyRegion => "EmptyRegion",
            Error::EmptyBall => "EmptyBall",
            Error::NoCorridor => "NoCorridor",
            Error::LabelNotBounded(_) => "LabelNotBounded",
            Error::OnBoundary => "OnBoundary",
            Error::CoverScaleTooLarge { .. } => "CoverScaleTooLarge",
            Error::MarginTooSmall(_) => "MarginTooSmall",
            Error::WrongConnectivity(_) => "WrongConnectivity",
            Error::SolverDivergence(_) => "SolverDivergence",
            Error::NonPositive(_) => "NonPositive",
            Error::NotMobiusRepresentable(_) => "NotMobiusRepresentable",
            Error::Precondition(_) => "Precondition",
            Error::TheoremViolation(_) => "TheoremViolation",
        }
    }
}
