//! Exact models of the n-baker map on the n-Chamanara surface, its symbolic
//! cover, the rotation quotient sphere, hyperbolic toral automorphisms, and a
//! finite-depth model of the blow-up inverse limit built on top of them.
//!
//! Coordinates are exact rationals (or elements of a real quadratic field when
//! an irrational eigenvalue is involved), so every equality check in this crate
//! is structural rather than approximate.

pub mod chamanara;
pub mod digits;
pub mod entropy;
pub mod error;
pub mod hyperlocal;
pub mod invlim;
pub mod plot;
pub mod quotient;
pub mod rational;
pub mod surd;
pub mod symbolic;
pub mod toral;
pub mod verify;

pub use chamanara::{ClassKind, CnPoint};
pub use digits::DigitNumber;
pub use error::{Error, Result};
pub use quotient::QnPoint;
pub use symbolic::{BiSequence, ProbabilityVector, Tail};
pub use toral::{ToralAuto, TorusPoint};
