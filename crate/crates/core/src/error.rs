use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} is not supported (need n >= 3)")]
    InvalidDimension(u32),
    #[error("base scalar curvature must be positive, got {0}")]
    NonPositiveRbar(f64),
    #[error("soliton constant rho = {0} is negative (expanding solitons are not supported)")]
    Expanding(f64),
    #[error("parameter record is inconsistent: {0}")]
    InconsistentParams(&'static str),
    #[error("{what} is outside its domain at {at}")]
    Domain { what: &'static str, at: f64 },
    #[error("operation requires the {0} regime")]
    WrongRegime(&'static str),
    #[error("z_alpha is not defined for n = 6 (the S2 domain starts at max(4, lambda^2))")]
    ZAlphaUndefined,
    #[error("series needs at least one term")]
    InvalidTerms,
    #[error("step size underflow at parameter {param}")]
    StepSizeUnderflow { param: f64 },
    #[error("trajectory left the chart domain at parameter {param}")]
    DomainExit { param: f64 },
    #[error("start point is a critical point")]
    StartAtCriticalPoint,
    #[error("trajectory did not return to the z-axis within the step budget")]
    NoReturn,
    #[error("return map is not increasing: z0 = {z0}, z_b = {zb}")]
    ReturnNotIncreasing { z0: f64, zb: f64 },
    #[error("only {found} samples near the requested end (need 10)")]
    InsufficientSamples { found: usize },
    #[error("series seed is not accurate at z = {z}")]
    SeedRejected { z: f64 },
    #[error("trajectory left the S1/S2a corridor at (z, w) = ({z}, {w})")]
    TrajectoryLeftRegion { z: f64, w: f64 },
    #[error("warp function is not positive at parameter {param}")]
    NonPositivePhi { param: f64 },
    #[error("trajectory could not be classified: {0}")]
    ClassificationFailed(&'static str),
}
