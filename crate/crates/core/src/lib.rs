//! Truncated noncommutative formal power series for Chen-Fliess operators.
//!
//! Series are indexed by words over `{x0, ..., xm}` and truncated by word
//! length. Every algebraic operation is generic over the coefficient ring
//! ([`Scalar`]); the aliases below fix the common choices.

pub mod bounds;
pub mod error;
pub mod evolution;
pub mod fliess;
pub mod groups;
pub mod poly;
pub mod products;
pub mod scalar;
pub mod series;
pub mod words;

pub use error::{Error, Result};
pub use groups::UnitalSeries;
pub use poly::Polynomial;
pub use scalar::{FieldScalar, RealScalar, Scalar, ScalarText};
pub use series::Series;
pub use words::{Alphabet, Letter, Word, WordMultiset};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type RationalSeries = Series<Rational>;
pub type FloatSeries = Series<f64>;
pub type SinglePrecisionSeries = Series<f32>;
/// Series whose coefficients are polynomials in symbolic parameters.
pub type SymbolicSeries = Series<Polynomial>;
