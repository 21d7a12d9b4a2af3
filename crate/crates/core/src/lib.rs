//! Parallel pairs, TEA pairs, extreme contractions and smooth points of
//! `L(l_p^n, l_p^m)` for `p` in `{1, inf}`, and linear maps that preserve them.
//!
//! Indices are 0-based throughout; operators are vectorized column-major.

pub mod error;
pub mod generate;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod preserver;
pub mod scalar;
pub mod vector;

pub use error::{Error, Result};
pub use operator::{OperatorMatrix, OperatorPhases, PairVerdict, ParallelWitness, WitnessKind};
pub use preserver::{ClassificationRecord, ClassifyBudget, PreserverMap, SampleVerdict};
pub use scalar::{Complex64, Field, Magnitude, Mode, Rational, Scalar, ScalarConfig};
pub use vector::{PNorm, PhaseSet, Vector};
