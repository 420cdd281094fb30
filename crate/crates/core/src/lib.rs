//! Traces of singular moduli and cycle integrals, half-integral weight Kloosterman
//! and Salié sums, Niebur–Poincaré series and the weight 3/2 mock modular forms
//! attached to the sesqui-harmonic function Ĵ.

pub mod arithmetic;
pub mod failure;
pub mod kloosterman;
pub mod mockforms;
pub mod numerics;
pub mod poincare;
pub mod qseries;
pub mod traces;
pub mod verify;

pub use failure::{Classify, FailureKind};
pub use numerics::{ExtComplex, ExtReal, DEFAULT_PREC};
pub use qseries::{QSeries, Support};
