use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid geometry: separation must be positive and finite, got {0:e} m")]
    InvalidGeometry(f64),
    #[error("reflectivity product {0} must lie in [0, 1)")]
    Reflectivity(f64),
    #[error("at gap {gap:e} m: {source}")]
    AtGap {
        gap: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(
        "no equilibrium: V = {voltage} V exceeds what the spring can balance on the scanned gaps"
    )]
    NoEquilibrium { voltage: f64 },
}

impl Error {
    pub(crate) fn at_gap(self, gap: f64) -> Self {
        Error::AtGap {
            gap,
            source: Box::new(self),
        }
    }

    /// True for budget exhaustion, missing equilibria and other numerical
    /// failures, as opposed to invalid inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerics(e) => !matches!(
                e,
                NumericsError::InvalidInterval { .. }
                    | NumericsError::InvalidTolerance(_)
                    | NumericsError::InvalidStep(_)
            ),
            Error::NoEquilibrium { .. } => true,
            Error::AtGap { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
