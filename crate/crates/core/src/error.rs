use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("antenna index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("{name} = {value} is outside its allowed range {range}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error(
        "approximate channel model needs distance >= {ratio} x max radius \
         (distance {distance} m, max radius {radius} m)"
    )]
    FarFieldViolated {
        ratio: f64,
        distance: f64,
        radius: f64,
    },

    #[error("all singular values are zero; no stream can carry power")]
    ZeroSpectrum,

    #[error("channel matrix is singular (or numerically rank deficient)")]
    SingularChannel,

    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("empty {0}")]
    Empty(&'static str),
}

impl Error {
    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroSpectrum
                | Error::SingularChannel
                | Error::NotPositiveDefinite
                | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
