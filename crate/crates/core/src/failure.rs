//! Coarse classification of errors, e.g. for process exit codes.

use crate::arithmetic::ArithmeticError;
use crate::kloosterman::KloostermanError;
use crate::mockforms::MockError;
use crate::numerics::NumericsError;
use crate::poincare::PoincareError;
use crate::qseries::QSeriesError;
use crate::traces::TraceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// a precondition on the arguments was violated
    InvalidInput,
    /// a sum, series or extrapolation missed its tolerance
    Convergence,
    /// an invariant of the implementation broke
    Internal,
}

pub trait Classify {
    fn kind(&self) -> FailureKind;
}

impl Classify for NumericsError {
    fn kind(&self) -> FailureKind {
        match self {
            NumericsError::Domain { .. } | NumericsError::Parse(_) => FailureKind::InvalidInput,
            NumericsError::Convergence { .. } => FailureKind::Convergence,
            NumericsError::PrecisionMismatch(..) => FailureKind::Internal,
        }
    }
}

impl Classify for ArithmeticError {
    fn kind(&self) -> FailureKind {
        match self {
            ArithmeticError::NotDiscriminant(_) | ArithmeticError::Domain(_) => FailureKind::InvalidInput,
            ArithmeticError::Internal(_) => FailureKind::Internal,
        }
    }
}

impl Classify for QSeriesError {
    fn kind(&self) -> FailureKind {
        match self {
            QSeriesError::Convergence { .. } => FailureKind::Convergence,
            QSeriesError::NotInvertible | QSeriesError::OutOfRange { .. } | QSeriesError::Domain(_) => FailureKind::InvalidInput,
        }
    }
}

impl Classify for KloostermanError {
    fn kind(&self) -> FailureKind {
        match self {
            KloostermanError::Arithmetic(e) => e.kind(),
            _ => FailureKind::InvalidInput,
        }
    }
}

impl Classify for PoincareError {
    fn kind(&self) -> FailureKind {
        match self {
            PoincareError::Domain(_) => FailureKind::InvalidInput,
            PoincareError::Numerics(e) => e.kind(),
            PoincareError::Kloosterman(e) => e.kind(),
            _ => FailureKind::Convergence,
        }
    }
}

impl Classify for TraceError {
    fn kind(&self) -> FailureKind {
        match self {
            TraceError::Domain(_) => FailureKind::InvalidInput,
            TraceError::Quadrature(_) => FailureKind::Convergence,
            TraceError::Arithmetic(e) => e.kind(),
            TraceError::QSeries(e) => e.kind(),
            TraceError::Poincare(e) => e.kind(),
            TraceError::Kloosterman(e) => e.kind(),
            TraceError::Numerics(e) => e.kind(),
        }
    }
}

impl Classify for MockError {
    fn kind(&self) -> FailureKind {
        match self {
            MockError::Domain(_) | MockError::Untagged => FailureKind::InvalidInput,
            MockError::NotIntegral { .. } | MockError::Inconclusive(_) => FailureKind::Convergence,
            MockError::Trace(e) => e.kind(),
            MockError::Poincare(e) => e.kind(),
            MockError::Arithmetic(e) => e.kind(),
            MockError::QSeries(e) => e.kind(),
            MockError::Numerics(e) => e.kind(),
        }
    }
}
