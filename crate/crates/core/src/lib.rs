//! Determinant-method toolkit.
//!
//! Exact multivariate polynomials and graded orderings ([`poly`]), leading-term
//! ideals, staircases and Hilbert functions ([`ideal`]), determinant estimates
//! ([`detbound`]), bounded-height point enumeration ([`points`]) and the
//! auxiliary-polynomial pipeline with independently checkable certificates
//! ([`engine`]).

pub mod detbound;
pub mod engine;
mod error;
pub mod ideal;
pub mod points;
pub mod poly;

pub use error::{Error, Result};

pub use engine::{
    AuxiliaryCertificate, Chart, PipelineReport, Strategy, VerifyOutcome,
};
pub use ideal::{GroebnerBasis, Ideal, Staircase};
pub use points::{HeightBox, PointMode, PointSet};
pub use poly::{ExponentVector, GradedOrdering, Polynomial, VarSpace};
