use thiserror::Error;

use crate::gatemetrics::GateError;
use crate::interaction::InteractionError;
use crate::mathcore::MathError;
use crate::propagator::PropagatorError;
use crate::sweep::SweepError;
use crate::twophoton::TwoPhotonError;

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error(transparent)]
    TwoPhoton(#[from] TwoPhotonError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

impl Error {
    /// True when the failure is numerical (quadrature, convergence, grid)
    /// rather than an invalid input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Math(e) => e.is_numerical(),
            Error::Gate(e) => e.is_numerical(),
            Error::Propagator(e) => e.is_numerical(),
            Error::Sweep(e) => e.is_numerical(),
            Error::Interaction(_) | Error::TwoPhoton(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
