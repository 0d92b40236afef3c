use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QmathError {
    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Qmath(#[from] QmathError),
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("bit value must be +1 or -1, got {0}")]
    InvalidBit(i8),
    #[error("fringe grid needs at least {min} points, got {got}")]
    GridTooSmall { got: usize, min: usize },
    #[error("number of trials must be at least 1")]
    NoTrials,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, min, max })
    }
}
