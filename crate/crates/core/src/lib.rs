//! Exact regular-open interval algebras, finitely additive credences and
//! their integrators.
//!
//! The core types are generic over an exact [`Scalar`]; the aliases below fix
//! it to arbitrary-precision rationals.

pub mod counterexamples;
pub mod credence;
pub mod elementary;
pub mod error;
pub mod finite_oracle;
pub mod integrator;
pub mod json;
pub mod liminal;
pub mod maps;
pub mod piecewise;
pub mod sample;
pub mod scalar;
pub mod selftest;
pub mod stone;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational, the default scalar.
pub type Rational = num_rational::BigRational;
/// Fixed-width rational for bulk checks on small inputs. Arithmetic overflow
/// panics when overflow checks are enabled.
pub type Rational128 = num_rational::Ratio<i128>;
pub type Extended = scalar::Extended<Rational>;
pub type Ambient = elementary::Ambient<Rational>;
pub type Interval = elementary::Interval<Rational>;
pub type ElementarySet = elementary::ElementarySet<Rational>;
pub type Credence = credence::Credence<Rational>;
pub type PiecewiseAffine = piecewise::PiecewiseAffine<Rational>;
pub type BPartition = integrator::BPartition<Rational>;
pub type SimpleFunction = integrator::SimpleFunction<Rational>;
pub type FiniteAlgebra = stone::FiniteAlgebra<Rational>;
pub type MonotoneAffineMap = maps::MonotoneAffineMap<Rational>;
