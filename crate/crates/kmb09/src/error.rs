//! Error type shared by all modules of this crate.

use core::fmt;

/// Errors reported by state construction, rate evaluation, simulation
/// configuration, and signature fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An angle argument was NaN or infinite.
    InvalidAngle(f64),
    /// A rate is undefined at the requested parameters (degenerate
    /// denominator or no detected bits).
    UndefinedRate(&'static str),
    /// A configuration value violated its contract (photon count, grid
    /// size, probability range, ...).
    InvalidParameter(&'static str),
    /// A signature fit could not be computed (fewer than two valid
    /// records, or zero QBER variance).
    DegenerateFit(&'static str),
    /// An operation needed rate estimates that the session did not
    /// produce.
    NoData(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidAngle(v) => write!(f, "invalid angle: {v} is not finite"),
            Error::UndefinedRate(why) => write!(f, "undefined rate: {why}"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::DegenerateFit(why) => write!(f, "degenerate fit: {why}"),
            Error::NoData(why) => write!(f, "no data: {why}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
